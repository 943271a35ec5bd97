#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gazedwell/engine.hpp"
#include "gazedwell/model.hpp"
#include "gazedwell/policy.hpp"
#include "gazedwell/trace_io.hpp"

namespace gazedwell {

// ---------------------------------------------------------------------------
// Synthetic corpora

struct SynthConfig {
  int n_trials = 500;
  uint64_t seed = 1;

  // Page generator: links of fixed height on text lines of a single column.
  double screen_width = 1280.0;
  double screen_height = 1024.0;
  int min_links = 8;
  int max_links = 20;
  double column_left = 60.0;
  double column_right = 1100.0;
  double first_line_top = 80.0;
  double line_spacing = 32.0;
  double link_height = 20.0;
  double min_link_width = 50.0;
  double max_link_width = 180.0;

  // Pre-select trajectory around the sampled fixations.
  double fixation_jitter_px = 5.0;
  double outlier_rate = 0.01;  // per fixation sample
  double outlier_offset_px = 150.0;
  double saccade_speed_px = 250.0;  // per sample while in transit
  int max_fixations = 60;

  // Post-select behaviour: move to the target and dwell there, sometimes
  // glancing at a neighbouring link first.
  int post_samples = 150;
  int post_transit_samples = 2;
  double post_jitter_px = 6.0;
  double distractor_rate = 0.0;
  double glance_median_ms = 200.0;
  double glance_log_sigma = 0.5;
};

// Deterministic in (config, model): the same seed gives identical corpora.
TrialSet synth_trials(const SynthConfig& config, const GazeModel& model);

PageLayout synth_layout(const SynthConfig& config, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Policy evaluation

struct PolicyEvalResult {
  PolicyParams policy;
  double error_rate = 0.0;
  double error_ci = 0.0;  // 95% half-width, normal approximation
  double mean_response_ms = 0.0;
  double response_ci = 0.0;
  int n_trials = 0;
  int timeouts = 0;  // no selection before the stream ended (counted as errors)
  int n_selected = 0;

  friend bool operator==(const PolicyEvalResult&, const PolicyEvalResult&) = default;
};

// Integer tallies per policy; summation order cannot change the result.
struct EvalTally {
  int n = 0;
  int errors = 0;
  int timeouts = 0;
  int selected = 0;
  int64_t rt_samples = 0;
  int64_t rt_samples_sq = 0;

  void add_selection(bool correct, int64_t rt);
  void add_timeout();
  PolicyEvalResult finish(const PolicyParams& policy, double sample_period_ms) const;
};

struct TrialOutcome {
  std::optional<LinkId> selected;
  int64_t response_samples = 0;
};

// Replays one trial's post-select stream through a fresh engine that enters
// the selection phase with the given posterior.
TrialOutcome replay_trial(const TrialRecord& trial, const IntentPosterior& posterior,
                          const PolicyParams& policy, QuantizeMode mode,
                          std::shared_ptr<const GazeModel> model);

// Segments pre_select, infers the posterior, then replays post_select.
PolicyEvalResult simulate_policy(std::span<const TrialRecord> trials, const PolicyParams& policy,
                                 const GazeModel& model, QuantizeMode mode);

// As simulate_policy with caller-supplied posteriors, one per trial.
PolicyEvalResult simulate_policy_with_posteriors(std::span<const TrialRecord> trials,
                                                 std::span<const IntentPosterior> posteriors,
                                                 const PolicyParams& policy, const GazeModel& model,
                                                 QuantizeMode mode);

// Policy-independent replay data: posterior, per-link firing times for every
// dwell length, and the first command activation. Evaluating a policy then
// costs one lookup per link per trial.
class ReplayCache {
 public:
  ReplayCache(std::span<const TrialRecord> trials, const GazeModel& model,
              const EngineConfig& engine_config = {});

  PolicyEvalResult evaluate(const PolicyParams& policy, QuantizeMode mode) const;
  TrialOutcome outcome(size_t trial, const DwellAssignment& dwells) const;

  size_t size() const { return trials_.size(); }
  const IntentPosterior& posterior(size_t trial) const { return trials_[trial].posterior; }

 private:
  struct LinkFiring {
    LinkId link;
    std::vector<int64_t> hit_times;
    mutable std::vector<int64_t> fire_by_n;  // index n-1; INT64_MAX when never
  };
  struct Trial {
    IntentPosterior posterior;
    LinkId target;
    std::vector<LinkFiring> links;
    int64_t command_cutoff;  // first command activation, INT64_MAX if none
    int64_t left_select;     // first sample outside Select, INT64_MAX if none
  };
  int64_t fire_time(const LinkFiring& lf, int n) const;

  std::vector<Trial> trials_;
  double window_factor_;
  double sample_period_ms_;
};

struct GridSpec {
  int time_steps = 30;       // t = k * T_s for k = 1..time_steps
  double p_step = 0.1;       // p_break = 0, p_step, ..., 1
  int time_stride = 1;       // use every stride-th time step
};

// All (t_max, t_min, t_break, p_break) with t_min <= t_break <= t_max on the
// grid, ordered by t_max, t_min, t_break, p_break.
std::vector<PolicyParams> grid_policies(const GridSpec& spec,
                                        double sample_period_ms = kSamplePeriodMs);

// Evaluates every policy; `threads` > 1 splits policies across workers.
// Rows come back in policy order regardless of threading.
std::vector<PolicyEvalResult> grid_search(const ReplayCache& cache,
                                          std::span<const PolicyParams> policies,
                                          QuantizeMode mode, int threads = 1);

// Rows not dominated in (error_rate, mean_response_ms), both minimised.
// Keeps input order.
std::vector<PolicyEvalResult> pareto_frontier(std::span<const PolicyEvalResult> results);

void write_results_csv(std::ostream& out, std::span<const PolicyEvalResult> results);

}  // namespace gazedwell
