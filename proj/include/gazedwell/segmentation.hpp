#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gazedwell/geometry.hpp"
#include "gazedwell/logmath.hpp"

namespace gazedwell {

struct GazeSample {
  int64_t t = 0;  // sample index at the tracker rate
  Point point;

  friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

using GazeTrace = std::vector<GazeSample>;

enum class Label : uint8_t { Fixation = 0, Saccade = 1, Outlier = 2 };
inline constexpr int kNumLabels = 3;

char label_char(Label l);

// Outliers only occur inside fixations: o->s, s->o and o->o never happen.
constexpr bool transition_allowed(Label from, Label to) {
  if (from == Label::Outlier) return to == Label::Fixation;
  if (to == Label::Outlier) return from == Label::Fixation;
  return true;
}

constexpr bool triple_allowed(Label l2, Label l1, Label l0) {
  return transition_allowed(l2, l1) && transition_allowed(l1, l0);
}

// Per-axis variances of a diagonal 2x2 covariance, in px^2.
struct DiagCov {
  double xx = 1.0;
  double yy = 1.0;

  friend bool operator==(const DiagCov&, const DiagCov&) = default;
};

struct SegModelParams {
  // transition[l2][l1][l0] = p(l_t = l0 | l_{t-2} = l2, l_{t-1} = l1).
  // Entries for disallowed triples stay exactly zero.
  std::array<std::array<std::array<double, 3>, 3>, 3> transition{};
  DiagCov sigma_f{25.0, 25.0};
  DiagCov sigma_s{1e4, 1e4};
  DiagCov sigma_o{4e4, 4e4};
  // Only used for the constant initial density over the first two samples.
  double screen_width = 1280.0;
  double screen_height = 1024.0;

  double& p(Label l2, Label l1, Label l0) {
    return transition[static_cast<int>(l2)][static_cast<int>(l1)][static_cast<int>(l0)];
  }
  double p(Label l2, Label l1, Label l0) const {
    return transition[static_cast<int>(l2)][static_cast<int>(l1)][static_cast<int>(l0)];
  }

  // Uniform over allowed successors, fixation jitter << saccade amplitude.
  static SegModelParams defaults();

  friend bool operator==(const SegModelParams&, const SegModelParams&) = default;
};

void validate(const SegModelParams& params);

// log N(g0; mu_e, Sigma_e) for the emission of g0 given the two preceding
// samples and the label triple. Throws on a disallowed triple.
double emission_logdensity(Label l2, Label l1, Label l0, Point g2, Point g1, Point g0,
                           const SegModelParams& params);

// The six allowed (l_{t-1}, l_t) pairs; the state space of the first-order
// reduction.
struct LabelPair {
  Label prev;
  Label cur;
};
std::span<const LabelPair> allowed_pairs();

// log p(l_1 l_2 ... l_T, g_1 ... g_T) for a full labeling. Returns -inf for
// labelings containing a forbidden transition.
double joint_logprob(std::span<const GazeSample> trace, std::span<const Label> labels,
                     const SegModelParams& params);

struct ViterbiResult {
  std::vector<Label> labels;
  double log_prob = kNegInf;
};

// Most probable labeling. Throws std::invalid_argument for traces shorter
// than three samples.
ViterbiResult viterbi(std::span<const GazeSample> trace, const SegModelParams& params);
std::vector<Label> viterbi_labels(std::span<const GazeSample> trace, const SegModelParams& params);

// log p(g_1 ... g_T), summed over labelings.
double trace_loglik(std::span<const GazeSample> trace, const SegModelParams& params);

struct SegTrainOptions {
  int max_iters = 200;
  double tol = 1e-6;            // relative log-likelihood improvement
  double variance_floor = 1.0;  // px^2
};

struct SegTrainResult {
  SegModelParams params;
  std::vector<double> loglik_history;  // corpus log-likelihood before each M-step
  int iterations = 0;
  bool converged = false;
  // Labels whose expected occupancy was zero; their covariance kept at init.
  std::vector<Label> degenerate_labels;
};

// EM on the pair-state reduction with structural zeros. Throws on an empty
// corpus or a trace shorter than three samples.
SegTrainResult train_segmentation(std::span<const GazeTrace> traces, const SegModelParams& init,
                                  const SegTrainOptions& options = {});

struct FixationEvent {
  double x = 0.0;
  double y = 0.0;
  double duration_ms = 0.0;
  int64_t start_index = 0;
  int64_t end_index = 0;

  Point location() const { return {x, y}; }
  friend bool operator==(const FixationEvent&, const FixationEvent&) = default;
};

using Scanpath = std::vector<FixationEvent>;

inline constexpr double kMinFixationMs = 100.0;

// Groups samples lying between two saccade labels into fixations. Runs that
// touch either end of the trace have no closing saccade and are not emitted.
Scanpath extract_fixations(std::span<const GazeSample> trace, std::span<const Label> labels,
                           double sample_period_ms = kSamplePeriodMs,
                           double min_duration_ms = kMinFixationMs);

// viterbi_labels followed by extract_fixations; traces shorter than three
// samples give an empty scanpath.
Scanpath segment_scanpath(std::span<const GazeSample> trace, const SegModelParams& params,
                          double sample_period_ms = kSamplePeriodMs);

struct LabeledTrace {
  GazeTrace samples;
  std::vector<Label> labels;
};

// Draws a trace of `length` samples from the generative model: the first two
// samples uniform over allowed pairs and over the screen, then label and
// emission per the second-order model.
LabeledTrace sample_segmentation_trace(const SegModelParams& params, int length,
                                       std::mt19937_64& rng);

}  // namespace gazedwell
