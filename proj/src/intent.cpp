#include "gazedwell/intent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace gazedwell {
namespace {

void check_k(Behavior k) {
  if (k == Behavior::Terminal) throw std::invalid_argument("terminal behaviour emits nothing");
}

struct AxisVariance {
  double beta;
  double sigma;
};

// Log emission of each fixation for each (link, behaviour), row-major
// [t][(m-1)*3 + k].
std::vector<std::vector<double>> emission_table(std::span<const FixationEvent> path,
                                                const PageLayout& layout,
                                                const IntentModelParams& params) {
  const int M = layout.size();
  std::vector<std::vector<double>> table(path.size(), std::vector<double>(static_cast<size_t>(M) * 3));
  for (size_t t = 0; t < path.size(); ++t) {
    std::array<double, 3> dur{};
    for (int k = 0; k < 3; ++k) {
      dur[k] = duration_logdensity(path[t].duration_ms, static_cast<Behavior>(k), params);
    }
    const double away = location_logdensity(path[t], 1, Behavior::Away, layout, params);
    for (int m = 1; m <= M; ++m) {
      auto* row = &table[t][static_cast<size_t>(m - 1) * 3];
      row[0] = dur[0] + location_logdensity(path[t], m, Behavior::OnLink, layout, params);
      row[1] = dur[1] + location_logdensity(path[t], m, Behavior::NearLink, layout, params);
      row[2] = dur[2] + away;
    }
  }
  return table;
}

// Forward pass kept entirely in log space. Slower than the scaled recursion
// (quadratic in the number of links) but immune to underflow.
std::vector<double> log_forward_posterior(const std::vector<std::vector<double>>& le, int M,
                                          const IntentModelParams& params) {
  const size_t S = static_cast<size_t>(M) * 3;
  std::vector<double> alpha(S), next(S), terms;
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < 3; ++k) alpha[m * 3 + k] = safe_log(params.pi[k] / M) + le[0][m * 3 + k];
  }
  terms.reserve(S);
  for (size_t t = 1; t < le.size(); ++t) {
    for (int m = 0; m < M; ++m) {
      for (int k = 0; k < 3; ++k) {
        terms.clear();
        for (int j = 0; j < M; ++j) {
          const double a = safe_log(target_transition(j + 1, m + 1, M, params.p_s));
          for (int kp = 0; kp < 3; ++kp) {
            terms.push_back(alpha[j * 3 + kp] + a + safe_log(params.behavior_transition[kp][k]));
          }
        }
        next[m * 3 + k] = log_sum_exp(terms) + le[t][m * 3 + k];
      }
    }
    std::swap(alpha, next);
  }
  std::vector<double> logp(static_cast<size_t>(M));
  for (int m = 0; m < M; ++m) {
    std::array<double, 3> v{};
    for (int k = 0; k < 3; ++k) v[k] = alpha[m * 3 + k] + safe_log(params.terminal_prob(k));
    logp[m] = log_sum_exp(v);
  }
  const double z = log_sum_exp(logp);
  std::vector<double> probs(static_cast<size_t>(M), 1.0 / M);
  if (z != kNegInf) {
    for (int m = 0; m < M; ++m) probs[m] = std::exp(logp[m] - z);
  }
  return probs;
}

// Weighted Gaussian objective for one axis and one behaviour:
//   sum_i w_i * log N(r_i; 0, (beta*size_i)^2 + sigma^2)
struct AxisData {
  std::vector<double> w, r2, size2;

  double objective(double beta, double sigma) const {
    double q = 0.0;
    const double b2 = beta * beta, s2 = sigma * sigma;
    for (size_t i = 0; i < w.size(); ++i) {
      const double v = b2 * size2[i] + s2;
      q += w[i] * (-0.5 * std::log(v) - 0.5 * r2[i] / v);
    }
    return q;
  }
  double total_weight() const { return std::accumulate(w.begin(), w.end(), 0.0); }
};

// Golden-section maximisation of a 1-D function on [lo, hi]; returns the best
// point seen.
double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters = 48) {
  constexpr double kInvPhi = 0.6180339887498949;
  if (!(hi > lo)) return lo;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  double best = fc >= fd ? c : d;
  double fbest = std::max(fc, fd);
  for (double edge : {lo, hi}) {
    const double fe = f(edge);
    if (fe > fbest) {
      fbest = fe;
      best = edge;
    }
  }
  return best;
}

constexpr double kMaxBeta = 4.0;
constexpr double kMaxSigmaPx = 2000.0;

// Generalised M-step for one axis: cyclic coordinate ascent over
// (beta_on, beta_near, sigma_on, sigma_near) keeping sigma_near >= sigma_on
// (and beta_near >= beta_on when requested). Each coordinate move is accepted
// only if the objective does not decrease, so the EM bound never drops.
void update_axis(const std::array<AxisData, 2>& data, std::array<double, 2>& beta,
                 std::array<double, 2>& sigma, const IntentTrainOptions& options) {
  auto total = [&](const std::array<double, 2>& b, const std::array<double, 2>& s) {
    return data[0].objective(b[0], s[0]) + data[1].objective(b[1], s[1]);
  };
  double current = total(beta, sigma);
  for (int sweep = 0; sweep < 12; ++sweep) {
    const double start = current;
    for (int coord = 0; coord < 4; ++coord) {
      const bool is_beta = coord < 2;
      const int k = coord % 2;
      if (data[k].total_weight() <= 0.0) continue;
      auto& vals = is_beta ? beta : sigma;
      double lo = is_beta ? 0.0 : options.sigma_floor_px;
      double hi = is_beta ? kMaxBeta : kMaxSigmaPx;
      const bool ordered = !is_beta || options.enforce_beta_order;
      if (ordered) {
        if (k == 0) hi = std::min(hi, vals[1]);
        if (k == 1) lo = std::max(lo, vals[0]);
      }
      auto f = [&](double v) {
        auto b = beta;
        auto s = sigma;
        (is_beta ? b : s)[k] = v;
        return total(b, s);
      };
      const double cand = golden_max(f, lo, hi);
      const double fc = f(cand);
      if (fc > current) {
        vals[k] = cand;
        current = fc;
      }
    }
    if (current - start <= 1e-10 * std::max(1.0, std::abs(current))) break;
  }
}

struct ClampedPass {
  double loglik = 0.0;
  // gamma[t][k] posterior behaviour occupancy, xi[k][k'] summed transitions.
  std::vector<std::array<double, 3>> gamma;
  std::array<std::array<double, 3>, 3> xi{};
};

ClampedPass clamped_forward_backward(const IntentTrial& trial, const IntentModelParams& params,
                                     bool with_stats) {
  const auto& path = trial.scanpath;
  const size_t n = path.size();
  ClampedPass pass;
  if (n == 0) return pass;
  std::vector<std::array<double, 3>> le(n), alpha(n), beta(n);
  for (size_t t = 0; t < n; ++t) {
    for (int k = 0; k < 3; ++k) {
      const auto b = static_cast<Behavior>(k);
      le[t][k] = location_logdensity(path[t], trial.target, b, trial.layout, params) +
                 duration_logdensity(path[t].duration_ms, b, params);
    }
  }
  std::array<std::array<double, 3>, 3> logA{};
  std::array<double, 3> logTS{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) logA[i][j] = safe_log(params.behavior_transition[i][j]);
    logTS[i] = safe_log(params.terminal_prob(i));
  }
  for (int k = 0; k < 3; ++k) alpha[0][k] = safe_log(params.pi[k]) + le[0][k];
  std::array<double, 3> terms{};
  for (size_t t = 1; t < n; ++t) {
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) terms[i] = alpha[t - 1][i] + logA[i][j];
      alpha[t][j] = log_sum_exp(terms) + le[t][j];
    }
  }
  for (int k = 0; k < 3; ++k) terms[k] = alpha[n - 1][k] + logTS[k];
  pass.loglik = log_sum_exp(terms);
  if (!with_stats) return pass;

  beta[n - 1] = logTS;
  for (size_t t = n - 1; t >= 1; --t) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) terms[j] = logA[i][j] + le[t][j] + beta[t][j];
      beta[t - 1][i] = log_sum_exp(terms);
    }
  }
  pass.gamma.resize(n);
  for (size_t t = 0; t < n; ++t) {
    for (int k = 0; k < 3; ++k) pass.gamma[t][k] = std::exp(alpha[t][k] + beta[t][k] - pass.loglik);
  }
  for (size_t t = 1; t < n; ++t) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        pass.xi[i][j] +=
            std::exp(alpha[t - 1][i] + logA[i][j] + le[t][j] + beta[t][j] - pass.loglik);
      }
    }
  }
  return pass;
}

}  // namespace

IntentModelParams IntentModelParams::fixture() {
  IntentModelParams p;
  p.behavior_transition = {{{0.57, 0.00, 0.08, 0.35}, {0.34, 0.55, 0.03, 0.08},
                            {0.05, 0.16, 0.59, 0.20}}};
  p.p_s = 0.1;
  p.beta_x = {0.17, 0.0};
  p.beta_y = {0.48, 0.0};
  p.sigma_x = {39.38, 126.43};
  p.sigma_y = {14.07, 38.41};
  p.mu_d = {2.90, 2.64, 2.54};
  p.sigma_d = {0.62, 0.45, 0.47};
  p.pi = {0.08, 0.66, 0.26};
  p.duration_unit_ms = kSamplePeriodMs;
  return p;
}

void validate(const IntentModelParams& p) {
  for (const auto& row : p.behavior_transition) {
    double sum = 0.0;
    for (double v : row) {
      if (v < 0.0 || !std::isfinite(v)) {
        throw std::invalid_argument("behaviour transitions must be finite and >= 0");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw std::invalid_argument("behaviour transition rows must sum to 1");
    }
  }
  const double pi_sum = p.pi[0] + p.pi[1] + p.pi[2];
  if (std::abs(pi_sum - 1.0) > 1e-6 || *std::min_element(p.pi.begin(), p.pi.end()) < 0.0) {
    throw std::invalid_argument("initial behaviour distribution must sum to 1");
  }
  if (!(p.p_s >= 0.0 && p.p_s <= 1.0)) throw std::invalid_argument("p_s must lie in [0,1]");
  for (int k = 0; k < 2; ++k) {
    if (!(p.sigma_x[k] > 0.0) || !(p.sigma_y[k] > 0.0)) {
      throw std::invalid_argument("location sigmas must be positive");
    }
    if (p.beta_x[k] < 0.0 || p.beta_y[k] < 0.0) {
      throw std::invalid_argument("location betas must be non-negative");
    }
  }
  if (p.sigma_x[1] < p.sigma_x[0] || p.sigma_y[1] < p.sigma_y[0]) {
    throw std::invalid_argument("near-link sigmas must not be smaller than on-link sigmas");
  }
  for (int k = 0; k < 3; ++k) {
    if (!(p.sigma_d[k] > 0.0)) throw std::invalid_argument("duration sigmas must be positive");
  }
  if (!(p.duration_unit_ms > 0.0)) throw std::invalid_argument("duration unit must be positive");
}

LinkId IntentPosterior::argmax() const {
  if (probs.empty()) throw std::logic_error("empty posterior");
  return static_cast<LinkId>(std::max_element(probs.begin(), probs.end()) - probs.begin()) + 1;
}

double location_logdensity(Point location, LinkId m, Behavior k, const PageLayout& layout,
                           const IntentModelParams& params) {
  check_k(k);
  if (k == Behavior::Away) return -std::log(layout.screen_width * layout.screen_height);
  const int i = static_cast<int>(k);
  const BoundingBox& box = layout.link(m).bbox;
  const Point c = box.center();
  const double bx = params.beta_x[i] * box.width;
  const double by = params.beta_y[i] * box.height;
  const double var_x = bx * bx + params.sigma_x[i] * params.sigma_x[i];
  const double var_y = by * by + params.sigma_y[i] * params.sigma_y[i];
  return log_normal2_diag(location.x - c.x, location.y - c.y, var_x, var_y);
}

double location_logdensity(const FixationEvent& f, LinkId m, Behavior k, const PageLayout& layout,
                           const IntentModelParams& params) {
  return location_logdensity(f.location(), m, k, layout, params);
}

double duration_logdensity(double duration_ms, Behavior k, const IntentModelParams& params) {
  check_k(k);
  if (!(duration_ms > 0.0)) throw std::invalid_argument("fixation duration must be positive");
  const int i = static_cast<int>(k);
  const double d = duration_ms / params.duration_unit_ms;
  const double z = (std::log(d) - params.mu_d[i]) / params.sigma_d[i];
  return -std::log(d) - std::log(params.sigma_d[i]) - 0.5 * kLog2Pi - 0.5 * z * z;
}

double target_transition(LinkId from, LinkId to, int num_links, double p_s) {
  if (num_links < 1) throw std::invalid_argument("need at least one link");
  if (num_links == 1) return from == to ? 1.0 : 0.0;
  return from == to ? 1.0 - p_s : p_s / (num_links - 1);
}

IntentPosterior forward_posterior(std::span<const FixationEvent> scanpath, const PageLayout& layout,
                                  const IntentModelParams& params, int window) {
  if (scanpath.empty()) throw std::invalid_argument("cannot infer a target from an empty scanpath");
  if (layout.links.empty()) throw std::invalid_argument("page layout has no links");
  const int M = layout.size();
  if (window > 0 && scanpath.size() > static_cast<size_t>(window)) {
    scanpath = scanpath.subspan(scanpath.size() - static_cast<size_t>(window));
  }
  const auto le = emission_table(scanpath, layout, params);
  const size_t S = static_cast<size_t>(M) * 3;

  // Scaled forward recursion: emissions are shifted by their per-step maximum
  // and alpha is renormalised each step. Both are common factors across
  // (m, k) and cancel in the normalised posterior.
  std::vector<double> alpha(S), next(S);
  auto shifted_emissions = [&](size_t t, std::vector<double>& out) {
    const double hi = *std::max_element(le[t].begin(), le[t].end());
    for (size_t s = 0; s < S; ++s) out[s] = std::exp(le[t][s] - hi);
  };
  bool underflow = false;
  auto normalise = [&underflow](std::vector<double>& v) {
    const double z = std::accumulate(v.begin(), v.end(), 0.0);
    if (z > 0.0 && std::isfinite(z)) {
      for (double& x : v) x /= z;
    } else {
      underflow = true;
    }
  };

  std::vector<double> e(S);
  shifted_emissions(0, e);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < 3; ++k) alpha[m * 3 + k] = params.pi[k] / M * e[m * 3 + k];
  }
  normalise(alpha);

  const double stay = M == 1 ? 1.0 : 1.0 - params.p_s;
  const double move = M == 1 ? 0.0 : params.p_s / (M - 1);
  std::array<double, 3> column{};
  std::vector<double> mixed(S);
  for (size_t t = 1; t < scanpath.size(); ++t) {
    column.fill(0.0);
    for (int m = 0; m < M; ++m) {
      for (int k = 0; k < 3; ++k) column[k] += alpha[m * 3 + k];
    }
    // Target chain: sum_j alpha(j,k') p(I=m | I=j).
    for (int m = 0; m < M; ++m) {
      for (int k = 0; k < 3; ++k) {
        const double own = alpha[m * 3 + k];
        const double others = std::max(0.0, column[k] - own);
        mixed[m * 3 + k] = stay * own + move * others;
      }
    }
    shifted_emissions(t, e);
    for (int m = 0; m < M; ++m) {
      for (int k = 0; k < 3; ++k) {
        double acc = 0.0;
        for (int kp = 0; kp < 3; ++kp) acc += mixed[m * 3 + kp] * params.behavior_transition[kp][k];
        next[m * 3 + k] = acc * e[m * 3 + k];
      }
    }
    normalise(next);
    std::swap(alpha, next);
  }

  IntentPosterior post;
  post.probs.assign(static_cast<size_t>(M), 0.0);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < 3; ++k) post.probs[m] += alpha[m * 3 + k] * params.terminal_prob(k);
  }
  const double z = std::accumulate(post.probs.begin(), post.probs.end(), 0.0);
  if (underflow || !(z > 0.0) || !std::isfinite(z)) {
    post.probs = log_forward_posterior(le, M, params);
  } else {
    for (double& p : post.probs) p /= z;
  }
  return post;
}

std::optional<LinkId> last_fixated_baseline(std::span<const FixationEvent> scanpath,
                                            const PageLayout& layout, double threshold) {
  for (auto it = scanpath.rbegin(); it != scanpath.rend(); ++it) {
    if (auto id = assign_gaze(it->location(), layout, threshold)) return id;
  }
  return std::nullopt;
}

std::vector<double> IntentTrainOptions::default_p_s_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(i / 100.0);
  return grid;
}

double clamped_loglik(std::span<const IntentTrial> corpus, const IntentModelParams& params) {
  double ll = 0.0;
  for (const auto& trial : corpus) ll += clamped_forward_backward(trial, params, false).loglik;
  return ll;
}

IntentTrainResult train_intent(std::span<const IntentTrial> corpus, const IntentModelParams& init,
                               const IntentTrainOptions& options) {
  if (corpus.empty()) throw std::invalid_argument("intent training corpus is empty");
  for (const auto& trial : corpus) {
    if (!trial.layout.has_link(trial.target)) {
      throw std::invalid_argument("training trial target " + std::to_string(trial.target) +
                                  " is not a link on its page");
    }
  }
  validate(init);

  IntentTrainResult result;
  result.params = init;
  IntentModelParams& p = result.params;

  for (int iter = 0;; ++iter) {
    std::array<double, 3> pi_acc{};
    std::array<std::array<double, 4>, 3> trans_acc{};
    std::array<double, 3> dur_w{}, dur_s{}, dur_ss{};
    std::array<AxisData, 2> x_data, y_data;
    double loglik = 0.0;

    for (const auto& trial : corpus) {
      if (trial.scanpath.empty()) continue;
      const ClampedPass pass = clamped_forward_backward(trial, p, true);
      loglik += pass.loglik;
      const auto& path = trial.scanpath;
      const size_t n = path.size();
      for (int k = 0; k < 3; ++k) {
        pi_acc[k] += pass.gamma[0][k];
        trans_acc[k][3] += pass.gamma[n - 1][k];
        for (int j = 0; j < 3; ++j) trans_acc[k][j] += pass.xi[k][j];
      }
      const BoundingBox& box = trial.layout.link(trial.target).bbox;
      const Point c = box.center();
      for (size_t t = 0; t < n; ++t) {
        const double ld = std::log(path[t].duration_ms / p.duration_unit_ms);
        for (int k = 0; k < 3; ++k) {
          const double g = pass.gamma[t][k];
          dur_w[k] += g;
          dur_s[k] += g * ld;
          dur_ss[k] += g * ld * ld;
        }
        const double dx = path[t].x - c.x, dy = path[t].y - c.y;
        for (int k = 0; k < 2; ++k) {
          const double g = pass.gamma[t][k];
          x_data[k].w.push_back(g);
          x_data[k].r2.push_back(dx * dx);
          x_data[k].size2.push_back(box.width * box.width);
          y_data[k].w.push_back(g);
          y_data[k].r2.push_back(dy * dy);
          y_data[k].size2.push_back(box.height * box.height);
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

    const double pi_sum = pi_acc[0] + pi_acc[1] + pi_acc[2];
    if (pi_sum > 0.0) {
      for (int k = 0; k < 3; ++k) p.pi[k] = pi_acc[k] / pi_sum;
    }
    for (int k = 0; k < 3; ++k) {
      const double row = trans_acc[k][0] + trans_acc[k][1] + trans_acc[k][2] + trans_acc[k][3];
      if (row > 0.0) {
        for (int j = 0; j < 4; ++j) p.behavior_transition[k][j] = trans_acc[k][j] / row;
      }
      if (dur_w[k] > 1e-12) {
        const double mean = dur_s[k] / dur_w[k];
        const double var = std::max(0.0, dur_ss[k] / dur_w[k] - mean * mean);
        p.mu_d[k] = mean;
        p.sigma_d[k] = std::max(options.sigma_d_floor, std::sqrt(var));
      }
    }
    update_axis(x_data, p.beta_x, p.sigma_x, options);
    update_axis(y_data, p.beta_y, p.sigma_y, options);
  }

  // Phase 2: target switching probability by held-in argmax accuracy.
  double best_acc = -1.0;
  double chosen = p.p_s;
  IntentModelParams trial_params = p;
  for (double ps : options.p_s_grid) {
    trial_params.p_s = ps;
    int correct = 0, total = 0;
    for (const auto& trial : corpus) {
      if (trial.scanpath.empty()) continue;
      ++total;
      const auto post = forward_posterior(trial.scanpath, trial.layout, trial_params, options.window);
      if (post.argmax() == trial.target) ++correct;
    }
    const double acc = total > 0 ? static_cast<double>(correct) / total : 0.0;
    result.p_s_accuracy.push_back(acc);
    if (acc > best_acc) {
      best_acc = acc;
      chosen = ps;
    }
  }
  p.p_s = chosen;
  return result;
}

SampledIntentTrial sample_intent_trial(const PageLayout& layout, const IntentModelParams& params,
                                       std::mt19937_64& rng, int max_length) {
  validate(layout);
  const int M = layout.size();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick_link(1, M);

  auto draw = [&](std::span<const double> probs) {
    const double r = u01(rng);
    double acc = 0.0;
    int last = 0;
    for (size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      last = static_cast<int>(i);
      acc += probs[i];
      if (r < acc) return static_cast<int>(i);
    }
    return last;
  };

  SampledIntentTrial out;
  out.trial.layout = layout;
  LinkId target = pick_link(rng);
  int behavior = draw(params.pi);
  for (int t = 0; t < max_length; ++t) {
    FixationEvent f;
    if (behavior == 2) {
      f.x = u01(rng) * layout.screen_width;
      f.y = u01(rng) * layout.screen_height;
    } else {
      const BoundingBox& box = layout.link(target).bbox;
      const Point c = box.center();
      const double bx = params.beta_x[behavior] * box.width;
      const double by = params.beta_y[behavior] * box.height;
      const double sx = std::sqrt(bx * bx + params.sigma_x[behavior] * params.sigma_x[behavior]);
      const double sy = std::sqrt(by * by + params.sigma_y[behavior] * params.sigma_y[behavior]);
      f.x = c.x + sx * unit(rng);
      f.y = c.y + sy * unit(rng);
    }
    const double z = unit(rng);
    f.duration_ms =
        std::exp(params.mu_d[behavior] + params.sigma_d[behavior] * z) * params.duration_unit_ms;
    out.trial.scanpath.push_back(f);
    out.behaviors.push_back(static_cast<Behavior>(behavior));
    out.targets.push_back(target);

    const int next = draw(params.behavior_transition[behavior]);
    if (next == 3) break;
    behavior = next;
    if (M > 1 && u01(rng) < params.p_s) {
      int other = std::uniform_int_distribution<int>(1, M - 1)(rng);
      if (other >= target) ++other;
      target = other;
    }
  }
  out.trial.target = target;
  return out;
}

}  // namespace gazedwell
