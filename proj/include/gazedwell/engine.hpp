#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "gazedwell/geometry.hpp"
#include "gazedwell/model.hpp"
#include "gazedwell/policy.hpp"

namespace gazedwell {

enum class Command { Back = 0, Select = 1, Cancel = 2, Forward = 3 };
inline constexpr int kNumCommands = 4;

std::string_view command_name(Command c);
std::optional<Command> parse_command(std::string_view name);

struct ButtonRegion {
  Command command;
  BoundingBox bbox;

  friend bool operator==(const ButtonRegion&, const ButtonRegion&) = default;
};

// Back, Select, Cancel, Forward stacked top to bottom in a task bar on the
// right edge of the screen.
std::vector<ButtonRegion> default_buttons(double screen_width, double screen_height);

// Throws unless there is exactly one region per command and none overlap.
void validate(std::span<const ButtonRegion> buttons);

// Samples needed inside a window of ceil(factor * n) recent samples.
int window_length(int n, double factor = 1.5);

// Counts hits among the most recent `window` sample indices and reports when
// at least `needed` of them are hits.
class WindowCounter {
 public:
  WindowCounter() = default;
  WindowCounter(int needed, int window) : needed_(needed), window_(window) {}

  // Records a hit at sample index t; true once the threshold is met.
  bool hit(int64_t t);
  void clear() { hits_.clear(); }
  int needed() const { return needed_; }
  int window() const { return window_; }

 private:
  int needed_ = 1;
  int window_ = 2;
  std::deque<int64_t> hits_;
};

struct EngineConfig {
  PolicyParams policy;
  QuantizeMode quantize = QuantizeMode::per_sample();
  int button_dwell_samples = 24;  // 400 ms at 60 Hz
  double window_factor = 1.5;
  bool strict_consecutive_buttons = false;
  double assign_threshold_px = kDefaultAssignThresholdPx;
  int inference_window = kInferenceWindow;
};

struct CommandActivated {
  Command command;
  int64_t t;
  friend bool operator==(const CommandActivated&, const CommandActivated&) = default;
};

struct LinkSelected {
  LinkId link;
  int64_t t;
  int64_t response_samples;  // since the eyes left the Select button
  double response_time_ms;
  friend bool operator==(const LinkSelected&, const LinkSelected&) = default;
};

struct SelectionCancelled {
  std::optional<LinkId> link;  // set when undoing a completed selection
  friend bool operator==(const SelectionCancelled&, const SelectionCancelled&) = default;
};

struct DwellsAssigned {
  DwellAssignment dwells;
  IntentPosterior posterior;
  int64_t t;
};

using EngineEvent = std::variant<CommandActivated, LinkSelected, SelectionCancelled, DwellsAssigned>;

enum class Phase { Browsing, Selecting };

// One gaze session. Single writer: feed_gaze/cancel/set_layout must be called
// from one logical stream.
class SelectionEngine {
 public:
  SelectionEngine(std::shared_ptr<const GazeModel> model, EngineConfig config);

  // Starts a new page: clears buffered gaze, histories and any selection phase.
  void set_layout(PageLayout layout, std::vector<ButtonRegion> buttons = {});
  void reset();

  // Throws std::invalid_argument when t does not increase or no layout is set.
  std::vector<EngineEvent> feed_gaze(const GazeSample& sample);

  // Leaves the selection phase, or undoes the selection that just fired.
  // Returns nothing when there is nothing to cancel.
  std::optional<EngineEvent> cancel();

  // Enters the selection phase with a precomputed posterior, as if Select had
  // been activated at sample t. Used by trace replay.
  DwellsAssigned begin_selection(const IntentPosterior& posterior, int64_t t);

  Phase phase() const { return phase_; }
  bool has_layout() const { return layout_.has_value(); }
  const PageLayout& layout() const { return *layout_; }
  const std::vector<ButtonRegion>& buttons() const { return buttons_; }
  const std::optional<DwellAssignment>& dwells() const { return dwells_; }
  const std::vector<GazeSample>& buffer() const { return buffer_; }
  const EngineConfig& config() const { return config_; }

 private:
  void clear_histories();
  void enter_browsing();
  std::optional<Command> button_at(Point p) const;
  bool button_tracked(Command c) const;
  bool update_button(Command c, int64_t t, bool inside);

  std::shared_ptr<const GazeModel> model_;
  EngineConfig config_;
  std::optional<PageLayout> layout_;
  std::vector<ButtonRegion> buttons_;

  Phase phase_ = Phase::Browsing;
  std::vector<GazeSample> buffer_;
  std::optional<int64_t> last_t_;
  std::optional<DwellAssignment> dwells_;
  std::vector<WindowCounter> link_windows_;
  std::array<WindowCounter, kNumCommands> button_windows_;
  std::array<int, kNumCommands> button_runs_{};
  std::optional<int64_t> select_activated_at_;
  std::optional<int64_t> left_select_at_;
  std::optional<LinkId> last_selected_;
};

// Time from the first sample outside the Select button after its activation
// to the first subsequent link selection in an event log. Throws when the log
// lacks a Select activation followed by a selection.
double response_time(std::span<const EngineEvent> events, std::span<const GazeSample> samples,
                     const BoundingBox& select_box, double sample_period_ms = kSamplePeriodMs);

}  // namespace gazedwell
