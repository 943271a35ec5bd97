#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazedwell/engine.hpp"
#include "gazedwell/model.hpp"
#include "gazedwell/segmentation.hpp"

namespace gazedwell {

inline constexpr int kTraceFormatVersion = 1;
inline constexpr const char* kDurationUnitSamples = "samples";

// Malformed trace or parameter input. `line` is 1-based, 0 when unknown.
class FormatError : public std::runtime_error {
 public:
  FormatError(int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

struct TraceHeader {
  int version = kTraceFormatVersion;
  double ts_ms = kSamplePeriodMs;
  std::string duration_unit = kDurationUnitSamples;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct TrialRecord {
  PageLayout layout;
  std::vector<ButtonRegion> buttons;  // empty: default task bar
  GazeTrace pre_select;               // page load up to Select activation
  GazeTrace post_select;              // from the eyes leaving Select
  LinkId true_target = 1;
  nlohmann::json meta = nlohmann::json::object();

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct TrialSet {
  TraceHeader header;
  std::vector<TrialRecord> trials;

  friend bool operator==(const TrialSet&, const TrialSet&) = default;
};

// Throws std::invalid_argument when the record breaks a trial invariant.
void validate(const TrialRecord& trial);

nlohmann::json layout_to_json(const PageLayout& layout, std::span<const ButtonRegion> buttons = {});
// Reads {screen:[w,h], links:[...], buttons:[...]?}; throws FormatError with
// the offending field.
PageLayout layout_from_json(const nlohmann::json& j, std::vector<ButtonRegion>* buttons = nullptr,
                            int line = 0);

nlohmann::json trial_to_json(const TrialRecord& trial);
TrialRecord trial_from_json(const nlohmann::json& j, int line = 0);

void write_trials(std::ostream& out, const TrialSet& set);
TrialSet read_trials(std::istream& in);
void save_trials(const TrialSet& set, const std::filesystem::path& path);
TrialSet load_trials(const std::filesystem::path& path);

// Flat `key = value` serialisation of both model stages.
std::string format_model(const GazeModel& model);
GazeModel parse_model(const std::string& text);
void save_model(const GazeModel& model, const std::filesystem::path& path);
GazeModel load_model(const std::filesystem::path& path);

}  // namespace gazedwell
