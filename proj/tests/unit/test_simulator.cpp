#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "gazedwell/simulator.hpp"

using namespace gazedwell;

namespace {

SynthConfig noisy(int n, uint64_t seed) {
  SynthConfig cfg;
  cfg.n_trials = n;
  cfg.seed = seed;
  cfg.distractor_rate = 0.3;
  return cfg;
}

PolicyParams random_policy(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> k(1, 30);
  int a = k(rng), b = k(rng), c = k(rng);
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  const double p = std::uniform_int_distribution<int>(0, 10)(rng) / 10.0;
  return {c * kSamplePeriodMs, a * kSamplePeriodMs, b * kSamplePeriodMs, p};
}

bool dominates(const PolicyEvalResult& a, const PolicyEvalResult& b) {
  return a.error_rate <= b.error_rate && a.mean_response_ms <= b.mean_response_ms &&
         (a.error_rate < b.error_rate || a.mean_response_ms < b.mean_response_ms);
}

}  // namespace

TEST_CASE("synthetic corpora are deterministic") {
  const GazeModel model;
  auto text = [&](uint64_t seed) {
    std::ostringstream out;
    write_trials(out, synth_trials(noisy(30, seed), model));
    return out.str();
  };
  CHECK(text(5) == text(5));
  CHECK(text(5) != text(6));
  for (const auto& t : synth_trials(noisy(30, 5), model).trials) {
    CHECK_NOTHROW(validate(t));
    CHECK(t.layout.size() >= 8);
  }
}

TEST_CASE("noiseless corpus is always selected correctly") {
  const GazeModel model;
  SynthConfig cfg;
  cfg.n_trials = 60;
  cfg.post_jitter_px = 0;
  cfg.distractor_rate = 0;
  cfg.post_transit_samples = 0;
  const TrialSet set = synth_trials(cfg, model);
  const ReplayCache cache(set.trials, model);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 40; ++i) {
    const auto p = random_policy(rng);
    CHECK(cache.evaluate(p, QuantizeMode::per_sample()).error_rate == 0.0);
  }
  CHECK(simulate_policy(set.trials, random_policy(rng), model, QuantizeMode::per_sample()).error_rate == 0.0);

  // The uniform slice is a (here flat) non-increasing staircase.
  double prev = 1.0;
  for (int k = 1; k <= 30; ++k) {
    const double e = cache.evaluate(uniform_policy(k * kSamplePeriodMs), QuantizeMode::per_sample()).error_rate;
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("replay cache agrees with the streaming engine") {
  auto model = std::make_shared<const GazeModel>();
  const TrialSet set = synth_trials(noisy(80, 11), *model);
  const ReplayCache cache(set.trials, *model);
  std::mt19937_64 rng(13);
  for (int i = 0; i < 40; ++i) {
    const auto policy = random_policy(rng);
    const QuantizeMode mode = i % 3 == 0 ? QuantizeMode::coarse(6) : QuantizeMode::per_sample();
    std::vector<IntentPosterior> posteriors;
    for (size_t t = 0; t < cache.size(); ++t) posteriors.push_back(cache.posterior(t));
    const auto fast = cache.evaluate(policy, mode);
    const auto slow = simulate_policy_with_posteriors(set.trials, posteriors, policy, *model, mode);
    CHECK(fast == slow);
    for (size_t t = 0; t < 10; ++t) {
      const auto dw = assign_dwells(cache.posterior(t), policy, mode);
      const auto a = cache.outcome(t, dw);
      const auto b = replay_trial(set.trials[t], cache.posterior(t), policy, mode, model);
      CHECK(a.selected == b.selected);
      CHECK(a.response_samples == b.response_samples);
    }
  }
  // The full path re-runs inference and must land on the same numbers.
  const auto policy = PolicyParams{500, 100, 200, 0.4};
  CHECK(simulate_policy(set.trials, policy, *model, QuantizeMode::per_sample()) ==
        cache.evaluate(policy, QuantizeMode::per_sample()));
}

TEST_CASE("uniform policies ignore the posterior") {
  const GazeModel model;
  const TrialSet set = synth_trials(noisy(60, 17), model);
  std::mt19937_64 rng(19);
  std::vector<IntentPosterior> scrambled;
  for (const auto& t : set.trials) {
    std::vector<double> probs(static_cast<size_t>(t.layout.size()));
    double s = 0;
    for (double& v : probs) s += (v = std::uniform_real_distribution<double>(0, 1)(rng));
    for (double& v : probs) v /= s;
    scrambled.push_back({probs});
  }
  for (double ms : {100.0, 250.0, 500.0}) {
    CHECK(simulate_policy(set.trials, uniform_policy(ms), model, QuantizeMode::per_sample()) ==
          simulate_policy_with_posteriors(set.trials, scrambled, uniform_policy(ms), model,
                                          QuantizeMode::per_sample()));
  }
}

TEST_CASE("metrics do not depend on trial order") {
  const GazeModel model;
  TrialSet set = synth_trials(noisy(80, 23), model);
  const auto policy = PolicyParams{400, 50, 120, 0.6};
  const auto before = ReplayCache(set.trials, model).evaluate(policy, QuantizeMode::per_sample());
  std::mt19937_64 rng(29);
  std::shuffle(set.trials.begin(), set.trials.end(), rng);
  const auto after = ReplayCache(set.trials, model).evaluate(policy, QuantizeMode::per_sample());
  CHECK(before == after);
}

TEST_CASE("timeouts and perfect dwells") {
  const GazeModel model;
  TrialSet set = synth_trials(noisy(3, 31), model);
  TrialRecord& lost = set.trials[0];
  for (auto& s : lost.post_select) s.point = {600, 1010};  // below every text line, off the bar
  TrialRecord& steady = set.trials[1];
  const Point c = steady.layout.link(steady.true_target).bbox.center();
  for (auto& s : steady.post_select) s.point = c;

  const ReplayCache cache(set.trials, model);
  const auto dw = assign_dwells(cache.posterior(0), uniform_policy(300), QuantizeMode::per_sample());
  CHECK_FALSE(cache.outcome(0, dw).selected.has_value());
  const auto dw1 = assign_dwells(cache.posterior(1), PolicyParams{500, 16.67, 50, 0.3}, QuantizeMode::per_sample());
  CHECK(cache.outcome(1, dw1).selected == steady.true_target);

  const auto r = cache.evaluate(uniform_policy(300), QuantizeMode::per_sample());
  CHECK(r.timeouts == 1);
  CHECK(r.n_trials == 3);
  CHECK(r.n_selected == 2);
  CHECK(r.error_rate >= 1.0 / 3);
}

TEST_CASE("grid construction") {
  const auto grid = grid_policies(GridSpec{});
  int triples = 0;
  for (int a = 1; a <= 30; ++a)
    for (int b = 1; b <= a; ++b)
      for (int c = b; c <= a; ++c) ++triples;
  CHECK(grid.size() == static_cast<size_t>(triples) * 11);
  CHECK(grid.size() == 54560);
  for (int k = 1; k <= 30; ++k) {
    const double t = k * kSamplePeriodMs;
    CHECK(std::count_if(grid.begin(), grid.end(), [&](const PolicyParams& p) {
            return p.t_max == t && p.t_min == t && p.t_break == t;
          }) == 11);
  }
  for (const auto& p : grid) CHECK_NOTHROW(validate(p));

  GridSpec two;
  two.time_steps = 1;
  two.p_step = 1.0;
  CHECK(grid_policies(two).size() == 2);
  GridSpec strided;
  strided.time_stride = 3;
  CHECK(grid_policies(strided).size() < grid.size());
}

TEST_CASE("grid search is deterministic across threads") {
  const GazeModel model;
  const TrialSet set = synth_trials(noisy(60, 37), model);
  const ReplayCache cache(set.trials, model);
  GridSpec spec;
  spec.time_stride = 2;
  spec.p_step = 0.25;
  const auto policies = grid_policies(spec);
  const auto serial = grid_search(cache, policies, QuantizeMode::per_sample(), 1);
  const auto parallel = grid_search(cache, policies, QuantizeMode::per_sample(), 4);
  CHECK(serial == parallel);
  std::ostringstream a, b;
  write_results_csv(a, serial);
  write_results_csv(b, parallel);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("tmax_ms,tmin_ms,tbreak_ms,pbreak,error_rate,err_ci,mean_rt_ms,rt_ci,n,timeouts\n", 0) == 0);
}

TEST_CASE("pareto frontier") {
  auto row = [](double err, double rt) {
    PolicyEvalResult r;
    r.error_rate = err;
    r.mean_response_ms = rt;
    return r;
  };
  SUBCASE("single row") {
    const std::vector rows{row(0.1, 200)};
    CHECK(pareto_frontier(rows) == rows);
  }
  SUBCASE("a dominated row is removed") {
    const std::vector rows{row(0.2, 300), row(0.1, 200)};
    CHECK(pareto_frontier(rows) == std::vector{row(0.1, 200)});
  }
  SUBCASE("random rows match the pairwise oracle") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<PolicyEvalResult> rows;
      for (int i = 0; i < 100; ++i) {
        // Coarse values so ties occur.
        rows.push_back(row(static_cast<int>(rng() % 20) / 20.0, 100 + static_cast<int>(rng() % 30) * 10.0));
      }
      std::vector<PolicyEvalResult> want;
      for (const auto& a : rows) {
        bool dominated = false;
        for (const auto& b : rows) dominated = dominated || dominates(b, a);
        if (!dominated) want.push_back(a);
      }
      CHECK(pareto_frontier(rows) == want);
    }
  }
}
