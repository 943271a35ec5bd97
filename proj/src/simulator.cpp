#include "gazedwell/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace gazedwell {
namespace {

constexpr int64_t kNever = std::numeric_limits<int64_t>::max();
constexpr double kZ95 = 1.959963984540054;

std::mt19937_64 trial_rng(uint64_t seed, uint64_t index) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

const BoundingBox& button_box(std::span<const ButtonRegion> buttons, Command c) {
  for (const auto& b : buttons) {
    if (b.command == c) return b.bbox;
  }
  throw std::invalid_argument("missing button region");
}

// Emits samples strictly between `from` and `to`.
void transit(GazeTrace& out, int64_t& t, Point from, Point to, int steps) {
  for (int i = 1; i <= steps; ++i) {
    const double f = static_cast<double>(i) / (steps + 1);
    out.push_back({t++, {from.x + f * (to.x - from.x), from.y + f * (to.y - from.y)}});
  }
}

void dwell(GazeTrace& out, int64_t& t, Point at, int samples, double jitter,
           std::normal_distribution<double>& unit, std::mt19937_64& rng) {
  for (int i = 0; i < samples; ++i) {
    const double dx = jitter * unit(rng);
    const double dy = jitter * unit(rng);
    out.push_back({t++, {at.x + dx, at.y + dy}});
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Synthesis

PageLayout synth_layout(const SynthConfig& cfg, std::mt19937_64& rng) {
  PageLayout layout;
  layout.screen_width = cfg.screen_width;
  layout.screen_height = cfg.screen_height;
  const int lines = std::max(
      1, static_cast<int>((cfg.screen_height - cfg.first_line_top - 40.0) / cfg.line_spacing));
  const int target = std::uniform_int_distribution<int>(cfg.min_links, cfg.max_links)(rng);
  std::uniform_int_distribution<int> pick_line(0, lines - 1);
  std::uniform_real_distribution<double> pick_width(cfg.min_link_width, cfg.max_link_width);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  constexpr double kGap = 15.0;

  std::vector<BoundingBox> boxes;
  for (int attempt = 0; attempt < target * 50 && static_cast<int>(boxes.size()) < target; ++attempt) {
    const double top = cfg.first_line_top + pick_line(rng) * cfg.line_spacing;
    const double width = std::round(pick_width(rng));
    const double left =
        std::round(cfg.column_left + u01(rng) * (cfg.column_right - cfg.column_left - width));
    const BoundingBox box{left, top, width, cfg.link_height};
    const bool clash = std::any_of(boxes.begin(), boxes.end(), [&](const BoundingBox& b) {
      return b.top == top && !(box.right() + kGap < b.left || b.right() + kGap < box.left);
    });
    if (!clash) boxes.push_back(box);
  }
  std::sort(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
    return a.top != b.top ? a.top < b.top : a.left < b.left;
  });
  for (size_t i = 0; i < boxes.size(); ++i) {
    layout.links.push_back({static_cast<LinkId>(i + 1), boxes[i], "link " + std::to_string(i + 1)});
  }
  return layout;
}

TrialSet synth_trials(const SynthConfig& cfg, const GazeModel& model) {
  if (cfg.n_trials < 0) throw std::invalid_argument("trial count must be non-negative");
  if (cfg.min_links < 1 || cfg.max_links < cfg.min_links) {
    throw std::invalid_argument("link count range is invalid");
  }
  if (cfg.post_samples < 1 || cfg.post_transit_samples < 0) {
    throw std::invalid_argument("post-select sample counts are invalid");
  }
  if (!(cfg.distractor_rate >= 0.0 && cfg.distractor_rate <= 1.0) ||
      !(cfg.outlier_rate >= 0.0 && cfg.outlier_rate <= 1.0)) {
    throw std::invalid_argument("rates must lie in [0, 1]");
  }
  if (cfg.fixation_jitter_px < 0.0 || cfg.post_jitter_px < 0.0 || !(cfg.saccade_speed_px > 0.0)) {
    throw std::invalid_argument("jitter must be non-negative and saccade speed positive");
  }
  validate(model.intent);

  const double ts = model.sample_period_ms;
  TrialSet set;
  set.header.ts_ms = ts;
  set.trials.reserve(static_cast<size_t>(cfg.n_trials));

  for (int i = 0; i < cfg.n_trials; ++i) {
    std::mt19937_64 rng = trial_rng(cfg.seed, static_cast<uint64_t>(i));
    std::normal_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    TrialRecord trial;
    trial.layout = synth_layout(cfg, rng);
    const auto buttons = default_buttons(cfg.screen_width, cfg.screen_height);
    const BoundingBox select = button_box(buttons, Command::Select);
    const SampledIntentTrial sampled =
        sample_intent_trial(trial.layout, model.intent, rng, cfg.max_fixations);
    trial.true_target = sampled.trial.target;

    auto transit_steps = [&](Point a, Point b) {
      const double dist = std::hypot(b.x - a.x, b.y - a.y);
      return std::max(1, static_cast<int>(std::ceil(dist / cfg.saccade_speed_px)));
    };

    // Pre-select: arrive from a random point, fixate each sampled location,
    // then dwell on Select until it activates.
    int64_t t = 0;
    Point pos{u01(rng) * cfg.screen_width * 0.8, u01(rng) * cfg.screen_height};
    trial.pre_select.push_back({t++, pos});
    for (const auto& f : sampled.trial.scanpath) {
      const Point loc = f.location();
      transit(trial.pre_select, t, pos, loc, transit_steps(pos, loc));
      const int n = std::max(1, static_cast<int>(std::lround(f.duration_ms / ts)));
      for (int k = 0; k < n; ++k) {
        double dx = cfg.fixation_jitter_px * unit(rng);
        double dy = cfg.fixation_jitter_px * unit(rng);
        if (k > 0 && k + 1 < n && u01(rng) < cfg.outlier_rate) {
          const double angle = u01(rng) * 2.0 * std::numbers::pi;
          dx = cfg.outlier_offset_px * std::cos(angle);
          dy = cfg.outlier_offset_px * std::sin(angle);
        }
        trial.pre_select.push_back({t++, {loc.x + dx, loc.y + dy}});
      }
      pos = loc;
    }
    const Point sel = select.center();
    transit(trial.pre_select, t, pos, sel, transit_steps(pos, sel));
    const double sel_jitter = std::min(5.0, 0.1 * std::min(select.width, select.height));
    for (int k = 0; k < 24; ++k) {
      const double dx = sel_jitter * unit(rng);
      const double dy = sel_jitter * unit(rng);
      trial.pre_select.push_back({t++, {sel.x + dx, sel.y + dy}});
    }

    // Post-select: optional glance at a neighbouring link, then the target.
    const Point target = trial.layout.link(trial.true_target).bbox.center();
    Point from = sel;
    if (trial.layout.size() > 1 && u01(rng) < cfg.distractor_rate) {
      std::vector<std::pair<double, LinkId>> near;
      for (const auto& l : trial.layout.links) {
        if (l.id == trial.true_target) continue;
        const Point c = l.bbox.center();
        near.emplace_back(std::hypot(c.x - target.x, c.y - target.y), l.id);
      }
      std::sort(near.begin(), near.end());
      const int pool = std::min<int>(3, static_cast<int>(near.size()));
      const LinkId distractor = near[std::uniform_int_distribution<int>(0, pool - 1)(rng)].second;
      const Point d = trial.layout.link(distractor).bbox.center();
      const double glance_ms = cfg.glance_median_ms * std::exp(cfg.glance_log_sigma * unit(rng));
      const int glance = std::max(1, static_cast<int>(std::lround(glance_ms / ts)));
      transit(trial.post_select, t, from, d, cfg.post_transit_samples);
      dwell(trial.post_select, t, d, glance, cfg.post_jitter_px, unit, rng);
      from = d;
    }
    transit(trial.post_select, t, from, target, cfg.post_transit_samples);
    const int remaining = cfg.post_samples - static_cast<int>(trial.post_select.size());
    dwell(trial.post_select, t, target, std::max(1, remaining), cfg.post_jitter_px, unit, rng);

    trial.meta = {{"trial", i}, {"source", "synthetic"}, {"seed", cfg.seed}};
    set.trials.push_back(std::move(trial));
  }
  return set;
}

// ---------------------------------------------------------------------------
// Evaluation

void EvalTally::add_selection(bool correct, int64_t rt) {
  ++n;
  ++selected;
  if (!correct) ++errors;
  rt_samples += rt;
  rt_samples_sq += rt * rt;
}

void EvalTally::add_timeout() {
  ++n;
  ++errors;
  ++timeouts;
}

PolicyEvalResult EvalTally::finish(const PolicyParams& policy, double ts) const {
  PolicyEvalResult r;
  r.policy = policy;
  r.n_trials = n;
  r.timeouts = timeouts;
  r.n_selected = selected;
  if (n > 0) {
    r.error_rate = static_cast<double>(errors) / n;
    r.error_ci = kZ95 * std::sqrt(r.error_rate * (1.0 - r.error_rate) / n);
  }
  if (selected > 0) {
    const double s = static_cast<double>(rt_samples);
    r.mean_response_ms = s / selected * ts;
    if (selected > 1) {
      const double var =
          (static_cast<double>(rt_samples_sq) - s * s / selected) / (selected - 1);
      r.response_ci = kZ95 * std::sqrt(std::max(0.0, var) / selected) * ts;
    }
  } else {
    r.mean_response_ms = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

TrialOutcome replay_trial(const TrialRecord& trial, const IntentPosterior& posterior,
                          const PolicyParams& policy, QuantizeMode mode,
                          std::shared_ptr<const GazeModel> model) {
  EngineConfig config;
  config.policy = policy;
  config.quantize = mode;
  SelectionEngine engine(std::move(model), config);
  engine.set_layout(trial.layout, trial.buttons);
  engine.begin_selection(posterior, trial.pre_select.back().t);
  for (const auto& s : trial.post_select) {
    for (const auto& ev : engine.feed_gaze(s)) {
      if (const auto* sel = std::get_if<LinkSelected>(&ev)) {
        return {sel->link, sel->response_samples};
      }
      if (std::holds_alternative<CommandActivated>(ev)) return {};
    }
  }
  return {};
}

PolicyEvalResult simulate_policy_with_posteriors(std::span<const TrialRecord> trials,
                                                 std::span<const IntentPosterior> posteriors,
                                                 const PolicyParams& policy, const GazeModel& model,
                                                 QuantizeMode mode) {
  if (trials.empty()) throw std::invalid_argument("no trials to simulate");
  if (posteriors.size() != trials.size()) {
    throw std::invalid_argument("need one posterior per trial");
  }
  validate(policy);
  auto shared = std::make_shared<const GazeModel>(model);
  EvalTally tally;
  for (size_t i = 0; i < trials.size(); ++i) {
    const TrialOutcome out = replay_trial(trials[i], posteriors[i], policy, mode, shared);
    if (out.selected) {
      tally.add_selection(*out.selected == trials[i].true_target, out.response_samples);
    } else {
      tally.add_timeout();
    }
  }
  return tally.finish(policy, model.sample_period_ms);
}

PolicyEvalResult simulate_policy(std::span<const TrialRecord> trials, const PolicyParams& policy,
                                 const GazeModel& model, QuantizeMode mode) {
  std::vector<IntentPosterior> posteriors;
  posteriors.reserve(trials.size());
  for (const auto& trial : trials) {
    posteriors.push_back(infer_posterior(trial.pre_select, trial.layout, model));
  }
  return simulate_policy_with_posteriors(trials, posteriors, policy, model, mode);
}

ReplayCache::ReplayCache(std::span<const TrialRecord> trials, const GazeModel& model,
                         const EngineConfig& engine_config)
    : window_factor_(engine_config.window_factor), sample_period_ms_(model.sample_period_ms) {
  if (trials.empty()) throw std::invalid_argument("no trials to simulate");
  trials_.reserve(trials.size());
  for (const auto& record : trials) {
    validate(record);
    Trial trial;
    trial.posterior =
        infer_posterior(record.pre_select, record.layout, model, engine_config.inference_window);
    trial.target = record.true_target;
    const auto buttons = record.buttons.empty()
                             ? default_buttons(record.layout.screen_width, record.layout.screen_height)
                             : record.buttons;
    const BoundingBox& select = button_box(buttons, Command::Select);

    std::vector<std::vector<int64_t>> hits(static_cast<size_t>(record.layout.size()));
    trial.command_cutoff = kNever;
    trial.left_select = kNever;
    const int bn = engine_config.button_dwell_samples;
    std::array<WindowCounter, kNumCommands> windows;
    for (auto& w : windows) w = WindowCounter(bn, window_length(bn, window_factor_));
    std::array<int, kNumCommands> runs{};
    for (const auto& s : record.post_select) {
      if (trial.left_select == kNever && !select.contains(s.point)) trial.left_select = s.t;
      if (auto link = assign_gaze(s.point, record.layout, engine_config.assign_threshold_px)) {
        hits[static_cast<size_t>(*link - 1)].push_back(s.t);
      }
      if (trial.command_cutoff != kNever) continue;
      for (const auto& b : buttons) {
        if (b.command == Command::Select) continue;
        const int i = static_cast<int>(b.command);
        const bool inside = b.bbox.contains(s.point);
        bool fired;
        if (engine_config.strict_consecutive_buttons) {
          runs[i] = inside ? runs[i] + 1 : 0;
          fired = runs[i] >= bn;
        } else {
          fired = inside && windows[i].hit(s.t);
        }
        if (fired) {
          trial.command_cutoff = s.t;
          break;
        }
      }
    }
    for (size_t m = 0; m < hits.size(); ++m) {
      if (hits[m].empty()) continue;
      LinkFiring lf{static_cast<LinkId>(m + 1), std::move(hits[m]), {}};
      const auto& p = lf.hit_times;
      lf.fire_by_n.assign(p.size(), kNever);
      for (size_t n = 1; n <= p.size(); ++n) {
        const int64_t w = window_length(static_cast<int>(n), window_factor_);
        for (size_t j = n - 1; j < p.size(); ++j) {
          if (p[j] - p[j - n + 1] < w) {
            lf.fire_by_n[n - 1] = p[j];
            break;
          }
        }
      }
      trial.links.push_back(std::move(lf));
    }
    trials_.push_back(std::move(trial));
  }
}

int64_t ReplayCache::fire_time(const LinkFiring& lf, int n) const {
  if (n < 1 || static_cast<size_t>(n) > lf.fire_by_n.size()) return kNever;
  return lf.fire_by_n[static_cast<size_t>(n - 1)];
}

TrialOutcome ReplayCache::outcome(size_t index, const DwellAssignment& dwells) const {
  const Trial& trial = trials_[index];
  int64_t best = kNever;
  LinkId winner = 0;
  for (const auto& lf : trial.links) {
    const int64_t f = fire_time(lf, dwells.samples(lf.link));
    if (f < best) {
      best = f;
      winner = lf.link;
    }
  }
  // A link and a command completing on the same sample: the link wins.
  if (best == kNever || best > trial.command_cutoff) return {};
  const int64_t rt = trial.left_select <= best ? best - trial.left_select : 0;
  return {winner, rt};
}

PolicyEvalResult ReplayCache::evaluate(const PolicyParams& policy, QuantizeMode mode) const {
  validate(policy);
  EvalTally tally;
  for (size_t i = 0; i < trials_.size(); ++i) {
    const DwellAssignment dwells =
        assign_dwells(trials_[i].posterior, policy, mode, sample_period_ms_);
    const TrialOutcome out = outcome(i, dwells);
    if (out.selected) {
      tally.add_selection(*out.selected == trials_[i].target, out.response_samples);
    } else {
      tally.add_timeout();
    }
  }
  return tally.finish(policy, sample_period_ms_);
}

std::vector<PolicyParams> grid_policies(const GridSpec& spec, double ts) {
  if (spec.time_steps < 1 || spec.time_stride < 1 || !(spec.p_step > 0.0) || spec.p_step > 1.0) {
    throw std::invalid_argument("invalid grid specification");
  }
  std::vector<double> times;
  for (int k = 1; k <= spec.time_steps; k += spec.time_stride) times.push_back(k * ts);
  const int p_count = static_cast<int>(std::lround(1.0 / spec.p_step));
  std::vector<double> probs;
  for (int i = 0; i <= p_count; ++i) probs.push_back(std::min(1.0, i * spec.p_step));

  std::vector<PolicyParams> out;
  for (size_t a = 0; a < times.size(); ++a) {         // t_max
    for (size_t b = 0; b <= a; ++b) {                 // t_min
      for (size_t c = b; c <= a; ++c) {               // t_break
        for (double p : probs) out.push_back({times[a], times[b], times[c], p});
      }
    }
  }
  return out;
}

std::vector<PolicyEvalResult> grid_search(const ReplayCache& cache,
                                          std::span<const PolicyParams> policies,
                                          QuantizeMode mode, int threads) {
  std::vector<PolicyEvalResult> results(policies.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(policies.size())));
  auto run = [&](int worker) {
    for (size_t i = static_cast<size_t>(worker); i < policies.size();
         i += static_cast<size_t>(workers)) {
      results[i] = cache.evaluate(policies[i], mode);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  return results;
}

std::vector<PolicyEvalResult> pareto_frontier(std::span<const PolicyEvalResult> results) {
  auto rt = [](const PolicyEvalResult& r) {
    return std::isnan(r.mean_response_ms) ? std::numeric_limits<double>::infinity()
                                          : r.mean_response_ms;
  };
  std::vector<size_t> order(results.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (results[a].error_rate != results[b].error_rate) {
      return results[a].error_rate < results[b].error_rate;
    }
    return rt(results[a]) < rt(results[b]);
  });
  std::vector<bool> keep(results.size(), false);
  double best_prev = std::numeric_limits<double>::infinity();
  for (size_t g = 0; g < order.size();) {
    size_t end = g;
    while (end < order.size() && results[order[end]].error_rate == results[order[g]].error_rate) ++end;
    const double group_min = rt(results[order[g]]);
    if (group_min < best_prev || (std::isinf(group_min) && std::isinf(best_prev) && g == 0)) {
      for (size_t i = g; i < end && rt(results[order[i]]) == group_min; ++i) keep[order[i]] = true;
    }
    best_prev = std::min(best_prev, group_min);
    g = end;
  }
  std::vector<PolicyEvalResult> out;
  for (size_t i = 0; i < results.size(); ++i) {
    if (keep[i]) out.push_back(results[i]);
  }
  return out;
}

void write_results_csv(std::ostream& out, std::span<const PolicyEvalResult> results) {
  out << "tmax_ms,tmin_ms,tbreak_ms,pbreak,error_rate,err_ci,mean_rt_ms,rt_ci,n,timeouts\n";
  char buf[256];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f,%.2f,%.3f,%.6f,%.6f,%.3f,%.3f,%d,%d\n",
                  r.policy.t_max, r.policy.t_min, r.policy.t_break, r.policy.p_break, r.error_rate,
                  r.error_ci, r.mean_response_ms, r.response_ci, r.n_trials, r.timeouts);
    out << buf;
  }
}

}  // namespace gazedwell
