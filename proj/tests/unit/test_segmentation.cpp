#include <doctest.h>

#include <random>

#include "gazedwell/segmentation.hpp"
#include "oracles.hpp"

using namespace gazedwell;
using L = Label;

namespace {

// Values of the scale a trained model settles at: long fixations, short
// saccades, rare outliers.
SegModelParams sticky_params() {
  SegModelParams p = SegModelParams::defaults();
  auto set = [&](L a, L b, double f, double s, double o) {
    p.p(a, b, L::Fixation) = f;
    p.p(a, b, L::Saccade) = s;
    p.p(a, b, L::Outlier) = o;
  };
  set(L::Fixation, L::Fixation, 0.90, 0.07, 0.03);
  set(L::Fixation, L::Saccade, 0.55, 0.45, 0.0);
  set(L::Fixation, L::Outlier, 1.0, 0.0, 0.0);
  set(L::Saccade, L::Fixation, 0.85, 0.12, 0.03);
  set(L::Saccade, L::Saccade, 0.6, 0.4, 0.0);
  set(L::Outlier, L::Fixation, 0.9, 0.08, 0.02);
  p.sigma_f = {25, 25};
  p.sigma_s = {1e4, 1e4};
  p.sigma_o = {4e4, 4e4};
  return p;
}

GazeTrace make_trace(std::initializer_list<Point> pts) {
  GazeTrace g;
  int64_t t = 0;
  for (Point p : pts) g.push_back({t++, p});
  return g;
}

}  // namespace

TEST_CASE("transition structure") {
  CHECK_FALSE(transition_allowed(L::Outlier, L::Saccade));
  CHECK_FALSE(transition_allowed(L::Saccade, L::Outlier));
  CHECK_FALSE(transition_allowed(L::Outlier, L::Outlier));
  CHECK(allowed_pairs().size() == 6);
  int triples = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) triples += triple_allowed(L(a), L(b), L(c));
  CHECK(triples == 14);
  CHECK_NOTHROW(validate(SegModelParams::defaults()));
  CHECK_NOTHROW(validate(sticky_params()));
}

TEST_CASE("emission density") {
  const SegModelParams p = sticky_params();
  const Point g{300, 200};

  SUBCASE("fff at zero residual is the peak of 1.5 sigma_f") {
    const double expect = -std::log(2 * M_PI) - 0.5 * std::log(1.5 * 25 * 1.5 * 25);
    CHECK(emission_logdensity(L::Fixation, L::Fixation, L::Fixation, g, g, g, p) ==
          doctest::Approx(expect).epsilon(1e-14));
  }
  SUBCASE("f,o,f is centred on g2") {
    const Point g2{100, 100}, g1{900, 900};
    const double at_g2 = emission_logdensity(L::Fixation, L::Outlier, L::Fixation, g2, g1, g2, p);
    CHECK(at_g2 == doctest::Approx(-std::log(2 * M_PI) - 0.5 * std::log(50.0 * 50.0)));
  }
  SUBCASE("matches the textbook formula on random allowed triples") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(0, 1000);
    for (int i = 0; i < 500; ++i) {
      const auto q = oracle::random_seg_params(rng);
      for (int code = 0; code < 27; ++code) {
        const L a = L(code / 9), b = L(code / 3 % 3), c = L(code % 3);
        if (!triple_allowed(a, b, c)) continue;
        const Point g2{pos(rng), pos(rng)}, g1{pos(rng), pos(rng)}, g0{pos(rng), pos(rng)};
        const double got = emission_logdensity(a, b, c, g2, g1, g0, q);
        const double want = oracle::seg_emission(a, b, c, g2, g1, g0, q);
        CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
      }
    }
  }
  SUBCASE("forbidden triples are rejected") {
    CHECK_THROWS_AS(emission_logdensity(L::Fixation, L::Outlier, L::Outlier, g, g, g, p),
                    std::invalid_argument);
    CHECK_THROWS_AS(emission_logdensity(L::Saccade, L::Outlier, L::Fixation, g, g, g, p),
                    std::invalid_argument);
  }
}

TEST_CASE("viterbi equals exhaustive enumeration") {
  std::mt19937_64 rng(17);
  for (int draw = 0; draw < 60; ++draw) {
    const auto p = oracle::random_seg_params(rng);
    const int T = 3 + draw % 6;
    const auto trace = oracle::random_trace(rng, T);
    const auto best = oracle::seg_enumerate(trace, p);
    const auto got = viterbi(trace, p);
    CHECK(got.log_prob == doctest::Approx(best.log_prob).epsilon(1e-12));
    CHECK(std::abs(oracle::seg_joint(trace, got.labels, p) - best.log_prob) <= 1e-9);
    for (size_t t = 1; t < got.labels.size(); ++t) {
      CHECK(transition_allowed(got.labels[t - 1], got.labels[t]));
    }
  }
}

TEST_CASE("joint_logprob and trace_loglik against the oracle") {
  std::mt19937_64 rng(23);
  for (int draw = 0; draw < 20; ++draw) {
    const auto p = oracle::random_seg_params(rng);
    const auto trace = oracle::random_trace(rng, 6);
    CHECK(trace_loglik(trace, p) == doctest::Approx(oracle::seg_enumerate_loglik(trace, p)).epsilon(1e-12));
    std::vector<Label> labels(6, L::Fixation);
    labels[2] = L::Saccade;
    CHECK(joint_logprob(trace, labels, p) == doctest::Approx(oracle::seg_joint(trace, labels, p)).epsilon(1e-12));
  }
  const auto trace = oracle::random_trace(rng, 4);
  const std::vector<Label> bad{L::Fixation, L::Outlier, L::Outlier, L::Fixation};
  CHECK(joint_logprob(trace, bad, SegModelParams::defaults()) == kNegInf);
}

TEST_CASE("viterbi on stereotyped traces") {
  const SegModelParams p = sticky_params();
  SUBCASE("a stationary cluster is one fixation") {
    const auto trace = make_trace({{500, 500}, {502, 499}, {499, 501}, {501, 502}, {500, 498}, {498, 500}});
    const auto labels = viterbi_labels(trace, p);
    CHECK(labels == std::vector<Label>(6, L::Fixation));
    CHECK(oracle::seg_enumerate(trace, p).labels == labels);
  }
  SUBCASE("a far-flung sample inside a fixation is an outlier") {
    const auto trace = make_trace({{500, 500}, {502, 499}, {499, 501}, {900, 100}, {501, 502}, {500, 498}, {498, 500}});
    const auto labels = viterbi_labels(trace, p);
    CHECK(labels[3] == L::Outlier);
    CHECK(oracle::seg_enumerate(trace, p).labels == labels);
  }
  SUBCASE("too short") {
    CHECK_THROWS_AS(viterbi_labels(make_trace({{1, 1}, {2, 2}}), p), std::invalid_argument);
  }
}

TEST_CASE("labels are translation invariant") {
  std::mt19937_64 rng(29);
  const SegModelParams p = sticky_params();
  for (int i = 0; i < 20; ++i) {
    auto trace = oracle::random_trace(rng, 40);
    const auto before = viterbi_labels(trace, p);
    for (auto& s : trace) {
      s.point.x += 137;
      s.point.y -= 64;
    }
    CHECK(viterbi_labels(trace, p) == before);
  }
}

TEST_CASE("extract_fixations") {
  auto labels_of = [](const char* s) {
    std::vector<Label> out;
    for (; *s; ++s) out.push_back(*s == 'f' ? L::Fixation : *s == 's' ? L::Saccade : L::Outlier);
    return out;
  };
  auto flat = [](size_t n) {
    GazeTrace g;
    for (size_t i = 0; i < n; ++i) g.push_back({static_cast<int64_t>(i), {10.0 * i, 5}});
    return g;
  };

  SUBCASE("six fixation samples between saccades give 100 ms") {
    const auto g = flat(8);
    const auto fx = extract_fixations(g, labels_of("sffffffs"));
    REQUIRE(fx.size() == 1);
    CHECK(fx[0].duration_ms == doctest::Approx(6 * kSamplePeriodMs));
    CHECK(fx[0].start_index == 1);
    CHECK(fx[0].end_index == 6);
    CHECK(fx[0].x == doctest::Approx(35.0));
  }
  SUBCASE("short groups are dropped") { CHECK(extract_fixations(flat(5), labels_of("sfffs")).empty()); }
  SUBCASE("outliers do not move the location or split the group") {
    auto g = flat(9);
    g[4].point = {5000, 5000};
    const auto fx = extract_fixations(g, labels_of("sfffofffs"));
    REQUIRE(fx.size() == 1);
    CHECK(fx[0].x == doctest::Approx((10 + 20 + 30 + 50 + 60 + 70) / 6.0));
    CHECK(fx[0].y == doctest::Approx(5.0));
  }
  SUBCASE("runs touching the trace edges are not closed") {
    CHECK(extract_fixations(flat(10), labels_of("ffffffffff")).empty());
    CHECK(extract_fixations(flat(10), labels_of("sfffffffff")).empty());
  }
  SUBCASE("events are ordered, disjoint and long enough") {
    std::mt19937_64 rng(31);
    const auto lt = sample_segmentation_trace(sticky_params(), 2000, rng);
    const auto fx = extract_fixations(lt.samples, lt.labels);
    CHECK(fx.size() > 10);
    for (size_t i = 0; i < fx.size(); ++i) {
      CHECK(fx[i].duration_ms >= kMinFixationMs - 1e-9);
      if (i) CHECK(fx[i].start_index > fx[i - 1].end_index);
    }
  }
}

TEST_CASE("training") {
  SUBCASE("log-likelihood never decreases") {
    std::mt19937_64 rng(37);
    std::vector<GazeTrace> corpus;
    for (int i = 0; i < 40; ++i) corpus.push_back(sample_segmentation_trace(sticky_params(), 120, rng).samples);
    SegTrainOptions opts;
    opts.max_iters = 40;
    opts.tol = 0;
    const auto r = train_segmentation(corpus, SegModelParams::defaults(), opts);
    for (size_t i = 1; i < r.loglik_history.size(); ++i) {
      CHECK(r.loglik_history[i] >= r.loglik_history[i - 1] - 1e-6);
    }
    CHECK_NOTHROW(validate(r.params));
  }
  SUBCASE("recovers the generating transitions") {
    std::mt19937_64 rng(41);
    const SegModelParams truth = sticky_params();
    std::vector<GazeTrace> corpus;
    for (int i = 0; i < 500; ++i) corpus.push_back(sample_segmentation_trace(truth, 120, rng).samples);
    const auto r = train_segmentation(corpus, SegModelParams::defaults());
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          if (!triple_allowed(L(a), L(b), L(c))) {
            CHECK(r.params.transition[a][b][c] == 0.0);
            continue;
          }
          if (!transition_allowed(L(a), L(b))) continue;
          INFO("triple " << label_char(L(a)) << label_char(L(b)) << label_char(L(c)));
          CHECK(std::abs(r.params.transition[a][b][c] - truth.transition[a][b][c]) <= 0.05);
        }
  }
  SUBCASE("constant traces drive sigma_f to the floor") {
    std::vector<GazeTrace> corpus(5, make_trace({{50, 50}, {50, 50}, {50, 50}, {50, 50}, {50, 50}, {50, 50}}));
    const auto r = train_segmentation(corpus, SegModelParams::defaults());
    CHECK(r.params.sigma_f.xx == doctest::Approx(1.0));
    CHECK(r.params.sigma_f.yy == doctest::Approx(1.0));
  }
  SUBCASE("bad corpora") {
    CHECK_THROWS_AS(train_segmentation({}, SegModelParams::defaults()), std::invalid_argument);
    std::vector<GazeTrace> shorty{make_trace({{1, 1}, {2, 2}})};
    CHECK_THROWS_AS(train_segmentation(shorty, SegModelParams::defaults()), std::invalid_argument);
  }
}
