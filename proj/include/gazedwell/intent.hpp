#pragma once

#include <array>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "gazedwell/geometry.hpp"
#include "gazedwell/segmentation.hpp"

namespace gazedwell {

// Gaze behaviour relative to the intended target. Terminal marks activation
// of the Select button and emits nothing.
enum class Behavior : int { OnLink = 0, NearLink = 1, Away = 2, Terminal = 3 };
inline constexpr int kNumBehaviors = 3;  // emitting behaviours

struct IntentModelParams {
  // Rows: previous behaviour (on, near, away). Columns: on, near, away, terminal.
  std::array<std::array<double, 4>, 3> behavior_transition{};
  double p_s = 0.1;  // probability that the intended target switches
  // Location spread for on-link (index 0) and near-link (index 1).
  std::array<double, 2> beta_x{};
  std::array<double, 2> beta_y{};
  std::array<double, 2> sigma_x{};  // px
  std::array<double, 2> sigma_y{};  // px
  // Lognormal duration per behaviour, in units of `duration_unit_ms`.
  std::array<double, 3> mu_d{};
  std::array<double, 3> sigma_d{};
  std::array<double, 3> pi{};
  double duration_unit_ms = kSamplePeriodMs;

  double terminal_prob(int k) const { return behavior_transition[k][3]; }

  // Averaged trained values reported for the gaze browser study; near-link
  // beta entries (reported as below 5e-3) are stored as 0.
  static IntentModelParams fixture();

  friend bool operator==(const IntentModelParams&, const IntentModelParams&) = default;
};

// Throws std::invalid_argument when rows or pi do not sum to one, a scale is
// non-positive, p_s is outside [0,1] or the near-link sigmas are smaller than
// the on-link ones.
void validate(const IntentModelParams& params);

struct IntentPosterior {
  std::vector<double> probs;  // probs[m - 1] for link id m

  LinkId argmax() const;  // lowest id on ties
};

inline constexpr int kInferenceWindow = 5;

double location_logdensity(Point location, LinkId m, Behavior k, const PageLayout& layout,
                           const IntentModelParams& params);
double location_logdensity(const FixationEvent& f, LinkId m, Behavior k,
                           const PageLayout& layout, const IntentModelParams& params);

// Throws std::invalid_argument for non-positive durations.
double duration_logdensity(double duration_ms, Behavior k, const IntentModelParams& params);

double target_transition(LinkId from, LinkId to, int num_links, double p_s);

// p(I_T = m | terminal, f_1..f_T) over the most recent `window` fixations.
// Throws on an empty scanpath or layout.
IntentPosterior forward_posterior(std::span<const FixationEvent> scanpath,
                                  const PageLayout& layout, const IntentModelParams& params,
                                  int window = kInferenceWindow);

// Link of the most recent fixation that lands within the assignment threshold
// of any link.
std::optional<LinkId> last_fixated_baseline(std::span<const FixationEvent> scanpath,
                                            const PageLayout& layout,
                                            double threshold = kDefaultAssignThresholdPx);

struct IntentTrial {
  Scanpath scanpath;
  PageLayout layout;
  LinkId target = 1;
};

struct IntentTrainOptions {
  int max_iters = 200;
  double tol = 1e-6;
  std::vector<double> p_s_grid = default_p_s_grid();
  bool enforce_beta_order = false;
  double sigma_floor_px = 1.0;
  double sigma_d_floor = 0.05;
  int window = kInferenceWindow;

  static std::vector<double> default_p_s_grid();  // 0, 0.01, ..., 0.5
};

struct IntentTrainResult {
  IntentModelParams params;
  std::vector<double> loglik_history;  // phase-1 log-likelihood before each M-step
  int iterations = 0;
  bool converged = false;
  std::vector<double> p_s_accuracy;  // accuracy for each grid value, same order
};

// Phase 1: EM over the behaviour chain with the target clamped to the known
// one. Phase 2: grid search over p_s by argmax accuracy, lowest p_s on ties.
IntentTrainResult train_intent(std::span<const IntentTrial> corpus, const IntentModelParams& init,
                               const IntentTrainOptions& options = {});

// Phase-1 objective: sum over trials of log p(f_1..f_T, terminal | target).
double clamped_loglik(std::span<const IntentTrial> corpus, const IntentModelParams& params);

struct SampledIntentTrial {
  IntentTrial trial;
  std::vector<Behavior> behaviors;
  std::vector<LinkId> targets;  // per fixation; trial.target is the last one
};

// Runs the factorial model forward until the behaviour chain hits Terminal.
// Sequences are capped at `max_length` fixations.
SampledIntentTrial sample_intent_trial(const PageLayout& layout, const IntentModelParams& params,
                                       std::mt19937_64& rng, int max_length = 60);

}  // namespace gazedwell
