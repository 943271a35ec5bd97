#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gazedwell/gateway.hpp"
#include "gazedwell/simulator.hpp"
#include "gazedwell/trace_io.hpp"

using namespace gazedwell;
using nlohmann::json;

namespace {

GazeModel model_from(const std::string& path) {
  return path.empty() ? GazeModel{} : load_model(path);
}

std::string labels_string(const std::vector<Label>& labels) {
  std::string s;
  s.reserve(labels.size());
  for (Label l : labels) s.push_back(label_char(l));
  return s;
}

json fixations_json(const Scanpath& scanpath) {
  json out = json::array();
  for (const auto& f : scanpath) {
    out.push_back({{"x", f.x}, {"y", f.y}, {"duration_ms", f.duration_ms},
                   {"start", f.start_index}, {"end", f.end_index}});
  }
  return out;
}

void print_result_row(const PolicyEvalResult& r) {
  write_results_csv(std::cout, std::span(&r, 1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic variable dwell-time gaze selection"};
  app.require_subcommand(1);

  std::string params_path;
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--params", params_path, "model parameter file (default: built-in fixture)")
        ->check(CLI::ExistingFile);
  };

  // segment
  auto* seg = app.add_subcommand("segment", "label the pre-select gaze of each trial");
  std::string seg_trace;
  seg->add_option("trace", seg_trace, "trial file")->required()->check(CLI::ExistingFile);
  add_params(seg);
  seg->callback([&] {
    const GazeModel model = model_from(params_path);
    const TrialSet set = load_trials(seg_trace);
    for (size_t i = 0; i < set.trials.size(); ++i) {
      const auto& trace = set.trials[i].pre_select;
      json row = {{"trial", i}};
      if (trace.size() >= 3) {
        const auto labels = viterbi_labels(trace, model.seg);
        row["labels"] = labels_string(labels);
        row["fixations"] = fixations_json(extract_fixations(trace, labels, model.sample_period_ms));
      } else {
        row["labels"] = "";
        row["fixations"] = json::array();
      }
      std::cout << row.dump() << '\n';
    }
  });

  // infer
  auto* inf = app.add_subcommand("infer", "target posterior for each trial");
  std::string inf_trials;
  int inf_window = kInferenceWindow;
  inf->add_option("trial", inf_trials, "trial file")->required()->check(CLI::ExistingFile);
  inf->add_option("--window", inf_window, "fixations used for inference")->check(CLI::PositiveNumber);
  add_params(inf);
  inf->callback([&] {
    const GazeModel model = model_from(params_path);
    const TrialSet set = load_trials(inf_trials);
    int correct = 0, baseline_correct = 0;
    for (size_t i = 0; i < set.trials.size(); ++i) {
      const auto& trial = set.trials[i];
      const Scanpath sp = segment_scanpath(trial.pre_select, model.seg, model.sample_period_ms);
      const IntentPosterior post = infer_posterior(trial.pre_select, trial.layout, model, inf_window);
      const auto base = last_fixated_baseline(sp, trial.layout);
      correct += post.argmax() == trial.true_target;
      baseline_correct += base == trial.true_target;
      json row = {{"trial", i}, {"posterior", post.probs}, {"argmax", post.argmax()},
                  {"baseline", base ? json(*base) : json(nullptr)}, {"true_target", trial.true_target}};
      std::cout << row.dump() << '\n';
    }
    if (!set.trials.empty()) {
      const double n = static_cast<double>(set.trials.size());
      std::cerr << "argmax accuracy " << correct / n << ", last-fixated baseline " << baseline_correct / n
                << '\n';
    }
  });

  // simulate
  auto* sim = app.add_subcommand("simulate", "evaluate one policy by trace replay");
  std::string sim_policy, sim_trials, sim_quantize = "per-sample";
  bool sim_engine = false;
  sim->add_option("--policy", sim_policy, "tmax,tmin,tbreak,pbreak in ms")->required();
  sim->add_option("--trials", sim_trials, "trial file")->required()->check(CLI::ExistingFile);
  sim->add_option("--quantize", sim_quantize, "per-sample | coarse:q");
  sim->add_flag("--engine", sim_engine, "replay every trial through the streaming engine");
  add_params(sim);
  sim->callback([&] {
    const GazeModel model = model_from(params_path);
    const TrialSet set = load_trials(sim_trials);
    const PolicyParams policy = parse_policy(sim_policy);
    const QuantizeMode mode = parse_quantize(sim_quantize);
    if (sim_engine) {
      print_result_row(simulate_policy(set.trials, policy, model, mode));
    } else {
      const ReplayCache cache(set.trials, model);
      print_result_row(cache.evaluate(policy, mode));
    }
  });

  // grid
  auto* grid = app.add_subcommand("grid", "exhaustive policy grid search");
  std::string grid_trials, grid_out, grid_pareto, grid_quantize = "per-sample";
  GridSpec spec;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  grid->add_option("--trials", grid_trials, "trial file")->required()->check(CLI::ExistingFile);
  grid->add_option("--out", grid_out, "CSV output")->required();
  grid->add_option("--pareto", grid_pareto, "also write the Pareto frontier here");
  grid->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  grid->add_option("--time-steps", spec.time_steps, "time grid points, one sample apart")
      ->check(CLI::PositiveNumber);
  grid->add_option("--time-stride", spec.time_stride, "keep every k-th time step")
      ->check(CLI::PositiveNumber);
  grid->add_option("--p-step", spec.p_step, "p_break grid step")->check(CLI::Range(1e-6, 1.0));
  grid->add_option("--quantize", grid_quantize, "per-sample | coarse:q");
  add_params(grid);
  grid->callback([&] {
    const GazeModel model = model_from(params_path);
    const TrialSet set = load_trials(grid_trials);
    const ReplayCache cache(set.trials, model);
    const auto policies = grid_policies(spec, model.sample_period_ms);
    const auto rows = grid_search(cache, policies, parse_quantize(grid_quantize), threads);
    std::ofstream out(grid_out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + grid_out);
    write_results_csv(out, rows);
    if (!grid_pareto.empty()) {
      std::ofstream pf(grid_pareto, std::ios::binary);
      if (!pf) throw std::runtime_error("cannot write " + grid_pareto);
      write_results_csv(pf, pareto_frontier(rows));
    }
    std::cerr << rows.size() << " policies evaluated\n";
  });

  // synth
  auto* syn = app.add_subcommand("synth", "generate a synthetic trial corpus");
  SynthConfig sc;
  std::string syn_out;
  syn->add_option("--n", sc.n_trials, "number of trials")->check(CLI::PositiveNumber);
  syn->add_option("--seed", sc.seed, "random seed");
  syn->add_option("--out", syn_out, "trial file")->required();
  syn->add_option("--jitter", sc.fixation_jitter_px, "pre-select fixation jitter (px)");
  syn->add_option("--post-jitter", sc.post_jitter_px, "post-select jitter (px)");
  syn->add_option("--distractor-rate", sc.distractor_rate, "chance of glancing at a neighbour")
      ->check(CLI::Range(0.0, 1.0));
  syn->add_option("--glance-ms", sc.glance_median_ms, "median glance duration (ms)");
  syn->add_option("--post-samples", sc.post_samples, "post-select stream length")
      ->check(CLI::PositiveNumber);
  add_params(syn);
  syn->callback([&] {
    const GazeModel model = model_from(params_path);
    save_trials(synth_trials(sc, model), syn_out);
  });

  // train-seg
  auto* tseg = app.add_subcommand("train-seg", "fit the segmentation model to pre-select gaze");
  std::string tseg_trials, tseg_out;
  SegTrainOptions seg_opts;
  tseg->add_option("--trials", tseg_trials, "trial file")->required()->check(CLI::ExistingFile);
  tseg->add_option("--out", tseg_out, "output parameter file")->required();
  tseg->add_option("--max-iters", seg_opts.max_iters)->check(CLI::PositiveNumber);
  tseg->add_option("--tol", seg_opts.tol);
  add_params(tseg);
  tseg->callback([&] {
    GazeModel model = model_from(params_path);
    const TrialSet set = load_trials(tseg_trials);
    std::vector<GazeTrace> traces;
    for (const auto& t : set.trials) {
      if (t.pre_select.size() >= 3) traces.push_back(t.pre_select);
    }
    const auto result = train_segmentation(traces, model.seg, seg_opts);
    model.seg = result.params;
    save_model(model, tseg_out);
    std::cerr << "iterations " << result.iterations << (result.converged ? " (converged)" : "")
              << ", log-likelihood " << result.loglik_history.back() << '\n';
  });

  // train-intent
  auto* tint = app.add_subcommand("train-intent", "fit the target inference model");
  std::string tint_trials, tint_out;
  IntentTrainOptions int_opts;
  tint->add_option("--trials", tint_trials, "trial file")->required()->check(CLI::ExistingFile);
  tint->add_option("--out", tint_out, "output parameter file")->required();
  tint->add_option("--max-iters", int_opts.max_iters)->check(CLI::PositiveNumber);
  tint->add_option("--tol", int_opts.tol);
  tint->add_flag("--enforce-beta-order", int_opts.enforce_beta_order,
                 "require near-link beta >= on-link beta");
  add_params(tint);
  tint->callback([&] {
    GazeModel model = model_from(params_path);
    const TrialSet set = load_trials(tint_trials);
    std::vector<IntentTrial> corpus;
    for (const auto& t : set.trials) {
      Scanpath sp = segment_scanpath(t.pre_select, model.seg, model.sample_period_ms);
      if (!sp.empty()) corpus.push_back({std::move(sp), t.layout, t.true_target});
    }
    const auto result = train_intent(corpus, model.intent, int_opts);
    model.intent = result.params;
    save_model(model, tint_out);
    std::cerr << "trials " << corpus.size() << ", iterations " << result.iterations
              << ", p_s " << result.params.p_s << '\n';
  });

  // serve
  auto* srv = app.add_subcommand("serve", "run the session gateway");
  uint16_t port = 7373;
  std::string host = "127.0.0.1", srv_policy = "500,500,500,1", srv_quantize = "per-sample";
  bool no_posterior = false, strict_buttons = false;
  srv->add_option("--port", port, "TCP port (0 picks one)");
  srv->add_option("--host", host, "listen address");
  srv->add_option("--policy", srv_policy, "tmax,tmin,tbreak,pbreak in ms");
  srv->add_option("--quantize", srv_quantize, "per-sample | coarse:q");
  srv->add_flag("--no-posterior", no_posterior, "omit posteriors from DWELLS");
  srv->add_flag("--strict-buttons", strict_buttons, "buttons need consecutive samples");
  add_params(srv);
  srv->callback([&] {
    auto model = std::make_shared<const GazeModel>(model_from(params_path));
    GatewayOptions opts;
    opts.engine.policy = parse_policy(srv_policy);
    opts.engine.quantize = parse_quantize(srv_quantize);
    opts.engine.strict_consecutive_buttons = strict_buttons;
    opts.include_posterior = !no_posterior;
    std::signal(SIGPIPE, SIG_IGN);
    GatewayServer server(model, opts);
    const uint16_t bound = server.listen(port, host);
    std::cout << "listening on " << host << ':' << bound << std::endl;
    server.serve();
  });

  // params
  auto* prm = app.add_subcommand("params", "write the built-in fixture parameters");
  std::string prm_out;
  prm->add_option("--out", prm_out, "output file (default: stdout)");
  prm->callback([&] {
    const GazeModel model;
    if (prm_out.empty()) {
      std::cout << format_model(model);
    } else {
      save_model(model, prm_out);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
