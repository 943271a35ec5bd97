#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gazedwell/simulator.hpp"
#include "gazedwell/trace_io.hpp"

using namespace gazedwell;

namespace {

TrialSet small_set() {
  SynthConfig cfg;
  cfg.n_trials = 4;
  cfg.seed = 3;
  cfg.distractor_rate = 0.5;
  return synth_trials(cfg, GazeModel{});
}

std::string dump(const TrialSet& set) {
  std::ostringstream out;
  write_trials(out, set);
  return out.str();
}

std::string header() { return R"({"format":"gdw-trace","version":1,"ts_ms":16.67,"duration_unit":"samples"})"; }

std::string trial_line(const std::string& extra_or_target = R"("true_target":1)",
                       const std::string& pre = "[[0,10,10],[1,11,10],[2,12,10]]") {
  return R"({"layout":{"screen":[1280,1024],"links":[{"id":1,"left":5,"top":5,"width":40,"height":20}]},"pre_select":)" +
         pre + R"(,"post_select":[[3,20,15]],)" + extra_or_target + "}";
}

void expect_error(const std::string& text, int line, const std::string& field) {
  std::istringstream in(text);
  try {
    read_trials(in);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.line() == line);
    CHECK(e.field() == field);
    CHECK(std::string(e.what()).find(field) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("trial files round-trip") {
  const TrialSet set = small_set();
  const std::string text = dump(set);
  std::istringstream in(text);
  const TrialSet back = read_trials(in);
  CHECK(back == set);
  CHECK(dump(back) == text);

  const auto path = std::filesystem::temp_directory_path() / "gazedwell_roundtrip.jsonl";
  save_trials(set, path);
  CHECK(load_trials(path) == set);
  std::filesystem::remove(path);
}

TEST_CASE("meta tags and buttons survive") {
  TrialSet set = small_set();
  set.trials[0].meta = {{"subject", "s07"}, {"experiment", 3}};
  set.trials[1].buttons = default_buttons(1280, 1024);
  std::istringstream in(dump(set));
  const TrialSet back = read_trials(in);
  CHECK(back.trials[0].meta["subject"] == "s07");
  CHECK(back.trials[1].buttons == set.trials[1].buttons);
}

TEST_CASE("malformed trial files") {
  SUBCASE("missing true_target") { expect_error(header() + "\n" + trial_line(R"("meta":{})"), 2, "true_target"); }
  SUBCASE("gap in sample indices") {
    expect_error(header() + "\n" + trial_line(R"("true_target":1)", "[[0,10,10],[2,11,10]]"), 2, "pre_select[1]");
  }
  SUBCASE("unknown target") { expect_error(header() + "\n" + trial_line(R"("true_target":4)"), 2, "true_target"); }
  SUBCASE("bad JSON on line 3") {
    expect_error(header() + "\n" + trial_line() + "\n{nope", 3, "");
  }
  SUBCASE("no header") { expect_error("", 0, "version"); }
  SUBCASE("wrong version") {
    expect_error(R"({"format":"gdw-trace","version":7,"ts_ms":16.67,"duration_unit":"samples"})", 1, "version");
  }
  SUBCASE("empty pre_select") {
    expect_error(header() + "\n" + trial_line(R"("true_target":1)", "[]"), 2, "pre_select");
  }
}

TEST_CASE("model parameter files") {
  const GazeModel model;
  const std::string text = format_model(model);
  CHECK(parse_model(text) == model);

  SUBCASE("shipped fixture matches the built-in values") {
    const auto path = std::filesystem::path(GAZEDWELL_DATA_DIR) / "table2-3.params";
    CHECK(load_model(path) == model);
  }
  SUBCASE("unknown key") {
    CHECK_THROWS_AS(parse_model(text + "intent.bogus = 1\n"), FormatError);
  }
  SUBCASE("duplicate key") {
    CHECK_THROWS_AS(parse_model(text + "intent.p_s = 0.2\n"), FormatError);
  }
  SUBCASE("missing key names the key") {
    std::string cut;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
      if (line.rfind("intent.mu_d", 0) != 0) cut += line + "\n";
    }
    try {
      parse_model(cut);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(e.field() == "intent.mu_d");
    }
  }
  SUBCASE("wrong arity") {
    std::string bad = text;
    bad.replace(bad.find("intent.p_s = 0.1"), 16, "intent.p_s = 0.1 0.2");
    CHECK_THROWS_AS(parse_model(bad), FormatError);
  }
  SUBCASE("invalid values are rejected") {
    std::string bad = text;
    bad.replace(bad.find("intent.pi = 0.08"), 16, "intent.pi = 0.50");
    CHECK_THROWS_AS(parse_model(bad), FormatError);
  }
}
