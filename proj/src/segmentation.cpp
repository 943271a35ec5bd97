#include "gazedwell/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gazedwell {
namespace {

constexpr Label F = Label::Fixation;
constexpr Label S = Label::Saccade;
constexpr Label O = Label::Outlier;

constexpr std::array<LabelPair, 6> kPairs{{{F, F}, {F, S}, {F, O}, {S, F}, {S, S}, {O, F}}};
constexpr int kNumPairs = static_cast<int>(kPairs.size());

constexpr int pair_index(Label prev, Label cur) {
  for (int i = 0; i < kNumPairs; ++i) {
    if (kPairs[i].prev == prev && kPairs[i].cur == cur) return i;
  }
  return -1;
}

constexpr std::array<Label, 3> kLabels{F, S, O};

struct EmissionShape {
  Point mean;
  double scale;  // multiplier on the base covariance
  const DiagCov* base;
};

EmissionShape emission_shape(Label l2, Label l1, Label l0, Point g2, Point g1,
                             const SegModelParams& params) {
  EmissionShape e{};
  if (l1 == F && l2 != O) {
    e.mean = {0.5 * (g2.x + g1.x), 0.5 * (g2.y + g1.y)};
  } else if (l2 == F && l1 == O) {
    e.mean = g2;
  } else {
    // l2 == o with l1 == f, or l1 == s
    e.mean = g1;
  }
  switch (l0) {
    case F:
      e.base = &params.sigma_f;
      e.scale = (l2 != O && l1 == F) ? 1.5 : 2.0;
      break;
    case S:
      e.base = &params.sigma_s;
      e.scale = 1.0;
      break;
    case O:
      e.base = &params.sigma_o;
      e.scale = 1.0;
      break;
  }
  return e;
}

double initial_logdensity(const SegModelParams& params) {
  const double area = params.screen_width * params.screen_height;
  return -std::log(static_cast<double>(kNumPairs)) - 2.0 * std::log(area);
}

void check_length(std::span<const GazeSample> trace) {
  if (trace.size() < 3) {
    throw std::invalid_argument("gaze trace needs at least 3 samples (got " +
                                std::to_string(trace.size()) + ")");
  }
}

// log transition + emission for moving from pair (a,b) at t-1 to (b,c) at t.
// Indexed [t][from_pair][to_pair]; -inf where the pairs do not chain.
using StepTable = std::vector<std::array<std::array<double, kNumPairs>, kNumPairs>>;

StepTable step_logprobs(std::span<const GazeSample> trace, const SegModelParams& params) {
  const size_t n = trace.size();
  StepTable table(n);
  std::array<std::array<double, kNumPairs>, kNumPairs> log_trans{};
  for (int i = 0; i < kNumPairs; ++i) {
    for (int j = 0; j < kNumPairs; ++j) {
      log_trans[i][j] = kPairs[i].cur == kPairs[j].prev
                            ? safe_log(params.p(kPairs[i].prev, kPairs[i].cur, kPairs[j].cur))
                            : kNegInf;
    }
  }
  for (size_t t = 2; t < n; ++t) {
    for (int i = 0; i < kNumPairs; ++i) {
      for (int j = 0; j < kNumPairs; ++j) {
        if (log_trans[i][j] == kNegInf) {
          table[t][i][j] = kNegInf;
          continue;
        }
        table[t][i][j] =
            log_trans[i][j] + emission_logdensity(kPairs[i].prev, kPairs[i].cur, kPairs[j].cur,
                                                  trace[t - 2].point, trace[t - 1].point,
                                                  trace[t].point, params);
      }
    }
  }
  return table;
}

struct ForwardBackward {
  std::vector<std::array<double, kNumPairs>> alpha;
  std::vector<std::array<double, kNumPairs>> beta;
  double loglik = kNegInf;
};

ForwardBackward forward_backward(const StepTable& steps, const SegModelParams& params,
                                 bool with_backward) {
  const size_t n = steps.size();
  ForwardBackward fb;
  fb.alpha.assign(n, {});
  const double init = initial_logdensity(params);
  fb.alpha[1].fill(init);
  std::array<double, kNumPairs> terms{};
  for (size_t t = 2; t < n; ++t) {
    for (int j = 0; j < kNumPairs; ++j) {
      for (int i = 0; i < kNumPairs; ++i) terms[i] = fb.alpha[t - 1][i] + steps[t][i][j];
      fb.alpha[t][j] = log_sum_exp(terms);
    }
  }
  fb.loglik = log_sum_exp(fb.alpha[n - 1]);
  if (!with_backward) return fb;
  fb.beta.assign(n, {});
  fb.beta[n - 1].fill(0.0);
  for (size_t t = n - 1; t >= 2; --t) {
    for (int i = 0; i < kNumPairs; ++i) {
      for (int j = 0; j < kNumPairs; ++j) terms[j] = steps[t][i][j] + fb.beta[t][j];
      fb.beta[t - 1][i] = log_sum_exp(terms);
    }
  }
  return fb;
}

}  // namespace

char label_char(Label l) {
  switch (l) {
    case Label::Fixation:
      return 'f';
    case Label::Saccade:
      return 's';
    case Label::Outlier:
      return 'o';
  }
  return '?';
}

SegModelParams SegModelParams::defaults() {
  SegModelParams params;
  for (Label l2 : kLabels) {
    for (Label l1 : kLabels) {
      if (!transition_allowed(l2, l1)) continue;
      int allowed = 0;
      for (Label l0 : kLabels) allowed += transition_allowed(l1, l0) ? 1 : 0;
      for (Label l0 : kLabels) {
        params.p(l2, l1, l0) = transition_allowed(l1, l0) ? 1.0 / allowed : 0.0;
      }
    }
  }
  return params;
}

void validate(const SegModelParams& params) {
  for (Label l2 : kLabels) {
    for (Label l1 : kLabels) {
      if (!transition_allowed(l2, l1)) continue;
      double sum = 0.0;
      for (Label l0 : kLabels) {
        const double p = params.p(l2, l1, l0);
        if (!triple_allowed(l2, l1, l0) && p != 0.0) {
          throw std::invalid_argument(std::string("forbidden transition ") + label_char(l2) +
                                      label_char(l1) + "->" + label_char(l0) +
                                      " must have probability 0");
        }
        if (p < 0.0 || !std::isfinite(p)) {
          throw std::invalid_argument("transition probabilities must be finite and >= 0");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string("transition row ") + label_char(l2) +
                                    label_char(l1) + " does not sum to 1");
      }
    }
  }
  for (const DiagCov* c : {&params.sigma_f, &params.sigma_s, &params.sigma_o}) {
    if (!(c->xx > 0.0) || !(c->yy > 0.0)) {
      throw std::invalid_argument("covariance diagonals must be positive");
    }
  }
  if (!(params.screen_width > 0.0) || !(params.screen_height > 0.0)) {
    throw std::invalid_argument("screen dimensions must be positive");
  }
}

std::span<const LabelPair> allowed_pairs() { return kPairs; }

double emission_logdensity(Label l2, Label l1, Label l0, Point g2, Point g1, Point g0,
                           const SegModelParams& params) {
  if (!triple_allowed(l2, l1, l0)) {
    throw std::invalid_argument(std::string("label triple ") + label_char(l2) + label_char(l1) +
                                label_char(l0) + " is not allowed");
  }
  const EmissionShape e = emission_shape(l2, l1, l0, g2, g1, params);
  return log_normal2_diag(g0.x - e.mean.x, g0.y - e.mean.y, e.scale * e.base->xx,
                          e.scale * e.base->yy);
}

double joint_logprob(std::span<const GazeSample> trace, std::span<const Label> labels,
                     const SegModelParams& params) {
  check_length(trace);
  if (labels.size() != trace.size()) throw std::invalid_argument("labels not aligned with trace");
  for (size_t t = 1; t < labels.size(); ++t) {
    if (!transition_allowed(labels[t - 1], labels[t])) return kNegInf;
  }
  double lp = initial_logdensity(params);
  for (size_t t = 2; t < trace.size(); ++t) {
    lp += safe_log(params.p(labels[t - 2], labels[t - 1], labels[t]));
    lp += emission_logdensity(labels[t - 2], labels[t - 1], labels[t], trace[t - 2].point,
                              trace[t - 1].point, trace[t].point, params);
  }
  return lp;
}

ViterbiResult viterbi(std::span<const GazeSample> trace, const SegModelParams& params) {
  check_length(trace);
  const size_t n = trace.size();
  const StepTable steps = step_logprobs(trace, params);
  std::vector<std::array<double, kNumPairs>> delta(n);
  std::vector<std::array<int8_t, kNumPairs>> back(n);
  delta[1].fill(initial_logdensity(params));
  for (size_t t = 2; t < n; ++t) {
    for (int j = 0; j < kNumPairs; ++j) {
      double best = kNegInf;
      int8_t arg = -1;
      for (int i = 0; i < kNumPairs; ++i) {
        const double v = delta[t - 1][i] + steps[t][i][j];
        if (v > best) {
          best = v;
          arg = static_cast<int8_t>(i);
        }
      }
      delta[t][j] = best;
      back[t][j] = arg;
    }
  }
  int state = 0;
  for (int j = 1; j < kNumPairs; ++j) {
    if (delta[n - 1][j] > delta[n - 1][state]) state = j;
  }
  ViterbiResult result;
  result.log_prob = delta[n - 1][state];
  result.labels.resize(n);
  for (size_t t = n - 1; t >= 1; --t) {
    result.labels[t] = kPairs[state].cur;
    if (t == 1) {
      result.labels[0] = kPairs[state].prev;
      break;
    }
    state = back[t][state];
  }
  return result;
}

std::vector<Label> viterbi_labels(std::span<const GazeSample> trace, const SegModelParams& params) {
  return viterbi(trace, params).labels;
}

double trace_loglik(std::span<const GazeSample> trace, const SegModelParams& params) {
  check_length(trace);
  return forward_backward(step_logprobs(trace, params), params, false).loglik;
}

SegTrainResult train_segmentation(std::span<const GazeTrace> traces, const SegModelParams& init,
                                  const SegTrainOptions& options) {
  if (traces.empty()) throw std::invalid_argument("segmentation training corpus is empty");
  for (const auto& trace : traces) check_length(trace);
  validate(init);

  SegTrainResult result;
  result.params = init;
  SegModelParams& params = result.params;

  for (int iter = 0;; ++iter) {
    // Expected triple counts and per-label weighted squared residuals.
    std::array<std::array<std::array<double, 3>, 3>, 3> counts{};
    std::array<double, 3> weight{};
    std::array<double, 3> ssx{};
    std::array<double, 3> ssy{};
    double loglik = 0.0;

    for (const auto& trace : traces) {
      const StepTable steps = step_logprobs(trace, params);
      const ForwardBackward fb = forward_backward(steps, params, true);
      loglik += fb.loglik;
      for (size_t t = 2; t < trace.size(); ++t) {
        for (int i = 0; i < kNumPairs; ++i) {
          if (fb.alpha[t - 1][i] == kNegInf) continue;
          for (int j = 0; j < kNumPairs; ++j) {
            if (steps[t][i][j] == kNegInf) continue;
            const double w =
                std::exp(fb.alpha[t - 1][i] + steps[t][i][j] + fb.beta[t][j] - fb.loglik);
            if (w == 0.0) continue;
            const Label l2 = kPairs[i].prev, l1 = kPairs[i].cur, l0 = kPairs[j].cur;
            const int c = static_cast<int>(l0);
            counts[static_cast<int>(l2)][static_cast<int>(l1)][c] += w;
            const EmissionShape e =
                emission_shape(l2, l1, l0, trace[t - 2].point, trace[t - 1].point, params);
            const double dx = trace[t].point.x - e.mean.x;
            const double dy = trace[t].point.y - e.mean.y;
            weight[c] += w;
            ssx[c] += w * dx * dx / e.scale;
            ssy[c] += w * dy * dy / e.scale;
          }
        }
      }
    }

    result.loglik_history.push_back(loglik);
    result.iterations = iter;
    if (iter > 0) {
      const double prev = result.loglik_history[iter - 1];
      if ((loglik - prev) < options.tol * std::abs(prev)) {
        result.converged = true;
        break;
      }
    }
    if (iter >= options.max_iters) break;

    for (Label l2 : kLabels) {
      for (Label l1 : kLabels) {
        if (!transition_allowed(l2, l1)) continue;
        const auto& row = counts[static_cast<int>(l2)][static_cast<int>(l1)];
        const double total = row[0] + row[1] + row[2];
        if (!(total > 0.0)) continue;
        for (Label l0 : kLabels) {
          params.p(l2, l1, l0) = triple_allowed(l2, l1, l0) ? row[static_cast<int>(l0)] / total : 0.0;
        }
      }
    }
    result.degenerate_labels.clear();
    DiagCov* covs[3] = {&params.sigma_f, &params.sigma_s, &params.sigma_o};
    for (int c = 0; c < 3; ++c) {
      if (!(weight[c] > 1e-12)) {
        result.degenerate_labels.push_back(static_cast<Label>(c));
        continue;
      }
      covs[c]->xx = std::max(options.variance_floor, ssx[c] / weight[c]);
      covs[c]->yy = std::max(options.variance_floor, ssy[c] / weight[c]);
    }
  }
  return result;
}

Scanpath extract_fixations(std::span<const GazeSample> trace, std::span<const Label> labels,
                           double sample_period_ms, double min_duration_ms) {
  if (labels.size() != trace.size()) throw std::invalid_argument("labels not aligned with trace");
  Scanpath path;
  std::optional<size_t> open;  // index of the saccade that opened the current group
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != Label::Saccade) continue;
    if (open && i > *open + 1) {
      const size_t first = *open + 1;
      const size_t last = i - 1;
      double sx = 0.0, sy = 0.0;
      int n = 0;
      for (size_t k = first; k <= last; ++k) {
        if (labels[k] != Label::Fixation) continue;
        sx += trace[k].point.x;
        sy += trace[k].point.y;
        ++n;
      }
      const double duration =
          static_cast<double>(trace[last].t - trace[first].t + 1) * sample_period_ms;
      if (n > 0 && duration + 1e-9 >= min_duration_ms) {
        path.push_back({sx / n, sy / n, duration, trace[first].t, trace[last].t});
      }
    }
    open = i;
  }
  return path;
}

Scanpath segment_scanpath(std::span<const GazeSample> trace, const SegModelParams& params,
                          double sample_period_ms) {
  if (trace.size() < 3) return {};
  return extract_fixations(trace, viterbi_labels(trace, params), sample_period_ms);
}

LabeledTrace sample_segmentation_trace(const SegModelParams& params, int length,
                                       std::mt19937_64& rng) {
  if (length < 2) throw std::invalid_argument("sampled trace length must be >= 2");
  LabeledTrace out;
  std::uniform_int_distribution<int> pick_pair(0, kNumPairs - 1);
  std::uniform_real_distribution<double> ux(0.0, params.screen_width);
  std::uniform_real_distribution<double> uy(0.0, params.screen_height);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const LabelPair first = kPairs[pick_pair(rng)];
  out.labels = {first.prev, first.cur};
  for (int64_t t = 0; t < 2; ++t) {
    const double x = ux(rng);
    out.samples.push_back({t, {x, uy(rng)}});
  }
  for (int t = 2; t < length; ++t) {
    const Label l2 = out.labels[t - 2], l1 = out.labels[t - 1];
    const double r = u01(rng);
    double acc = 0.0;
    Label l0 = F;
    for (Label cand : kLabels) {
      const double p = params.p(l2, l1, cand);
      if (p <= 0.0) continue;
      l0 = cand;
      acc += p;
      if (r < acc) break;
    }
    const EmissionShape e =
        emission_shape(l2, l1, l0, out.samples[t - 2].point, out.samples[t - 1].point, params);
    const double x = e.mean.x + std::sqrt(e.scale * e.base->xx) * unit(rng);
    const double y = e.mean.y + std::sqrt(e.scale * e.base->yy) * unit(rng);
    out.labels.push_back(l0);
    out.samples.push_back({t, {x, y}});
  }
  return out;
}

}  // namespace gazedwell
