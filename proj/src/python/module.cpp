#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gazedwell/gateway.hpp"
#include "gazedwell/model.hpp"
#include "gazedwell/simulator.hpp"
#include "gazedwell/trace_io.hpp"

namespace py = pybind11;
using namespace gazedwell;

namespace {

using PolicyTuple = std::tuple<double, double, double, double>;

PolicyParams to_policy(const PolicyTuple& t) {
  const PolicyParams p{std::get<0>(t), std::get<1>(t), std::get<2>(t), std::get<3>(t)};
  validate(p);
  return p;
}

GazeModel to_model(const std::optional<std::string>& params) {
  return params ? parse_model(*params) : GazeModel{};
}

PageLayout to_layout(const std::string& layout_json) {
  return layout_from_json(nlohmann::json::parse(layout_json));
}

GazeTrace to_trace(const std::vector<std::pair<double, double>>& points) {
  GazeTrace trace;
  trace.reserve(points.size());
  int64_t t = 0;
  for (const auto& [x, y] : points) trace.push_back({t++, {x, y}});
  return trace;
}

std::vector<FixationEvent> to_fixations(const std::vector<std::tuple<double, double, double>>& rows) {
  std::vector<FixationEvent> out;
  for (const auto& [x, y, d] : rows) out.push_back({x, y, d, 0, 0});
  return out;
}

TrialSet to_trials(const std::string& jsonl) {
  std::istringstream in(jsonl);
  return read_trials(in);
}

py::dict result_dict(const PolicyEvalResult& r) {
  py::dict d;
  d["policy"] = py::make_tuple(r.policy.t_max, r.policy.t_min, r.policy.t_break, r.policy.p_break);
  d["error_rate"] = r.error_rate;
  d["error_ci"] = r.error_ci;
  d["mean_response_ms"] = r.mean_response_ms;
  d["response_ci"] = r.response_ci;
  d["n_trials"] = r.n_trials;
  d["n_selected"] = r.n_selected;
  d["timeouts"] = r.timeouts;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gazedwell, m) {
  m.doc() = "Probabilistic variable dwell-time gaze selection";
  m.attr("SAMPLE_PERIOD_MS") = kSamplePeriodMs;
  m.attr("PROTOCOL_VERSION") = std::string(kProtocolVersion);

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  m.def("box_distance",
        [](double x, double y, double left, double top, double width, double height) {
          return box_distance({x, y}, {left, top, width, height});
        },
        py::arg("x"), py::arg("y"), py::arg("left"), py::arg("top"), py::arg("width"), py::arg("height"));

  m.def("assign_gaze",
        [](double x, double y, const std::string& layout, double threshold) {
          return assign_gaze({x, y}, to_layout(layout), threshold);
        },
        py::arg("x"), py::arg("y"), py::arg("layout"), py::arg("threshold") = kDefaultAssignThresholdPx);

  m.def("fixture_params", [] { return format_model(GazeModel{}); });

  m.def("segment",
        [](const std::vector<std::pair<double, double>>& points, const std::optional<std::string>& params) {
          const GazeModel model = to_model(params);
          const GazeTrace trace = to_trace(points);
          const auto labels = viterbi_labels(trace, model.seg);
          std::string text;
          for (Label l : labels) text += label_char(l);
          py::list fixations;
          for (const auto& f : extract_fixations(trace, labels, model.sample_period_ms)) {
            py::dict d;
            d["x"] = f.x;
            d["y"] = f.y;
            d["duration_ms"] = f.duration_ms;
            d["start"] = f.start_index;
            d["end"] = f.end_index;
            fixations.append(d);
          }
          return py::make_tuple(text, fixations);
        },
        py::arg("points"), py::arg("params") = py::none());

  m.def("forward_posterior",
        [](const std::vector<std::tuple<double, double, double>>& fixations, const std::string& layout,
           const std::optional<std::string>& params, int window) {
          return forward_posterior(to_fixations(fixations), to_layout(layout), to_model(params).intent, window)
              .probs;
        },
        py::arg("fixations"), py::arg("layout"), py::arg("params") = py::none(),
        py::arg("window") = kInferenceWindow);

  m.def("infer",
        [](const std::vector<std::pair<double, double>>& points, const std::string& layout,
           const std::optional<std::string>& params) {
          return infer_posterior(to_trace(points), to_layout(layout), to_model(params)).probs;
        },
        py::arg("points"), py::arg("layout"), py::arg("params") = py::none());

  m.def("last_fixated_baseline",
        [](const std::vector<std::tuple<double, double, double>>& fixations, const std::string& layout) {
          return last_fixated_baseline(to_fixations(fixations), to_layout(layout));
        },
        py::arg("fixations"), py::arg("layout"));

  m.def("nominal_dwell", [](double p, const PolicyTuple& policy) { return nominal_dwell(p, to_policy(policy)); },
        py::arg("p"), py::arg("policy"));

  m.def("assign_dwells",
        [](const std::vector<double>& probs, const PolicyTuple& policy, const std::string& quantize) {
          std::vector<int> samples;
          for (const auto& l : assign_dwells({probs}, to_policy(policy), parse_quantize(quantize)).links) {
            samples.push_back(l.samples);
          }
          return samples;
        },
        py::arg("probs"), py::arg("policy"), py::arg("quantize") = "per-sample");

  m.def("synth",
        [](int n, uint64_t seed, double distractor_rate, double post_jitter_px,
           const std::optional<std::string>& params) {
          SynthConfig cfg;
          cfg.n_trials = n;
          cfg.seed = seed;
          cfg.distractor_rate = distractor_rate;
          cfg.post_jitter_px = post_jitter_px;
          std::ostringstream out;
          write_trials(out, synth_trials(cfg, to_model(params)));
          return out.str();
        },
        py::arg("n"), py::arg("seed") = 1, py::arg("distractor_rate") = 0.0, py::arg("post_jitter_px") = 6.0,
        py::arg("params") = py::none());

  m.def("simulate",
        [](const std::string& trials, const PolicyTuple& policy, const std::string& quantize,
           const std::optional<std::string>& params) {
          const TrialSet set = to_trials(trials);
          const GazeModel model = to_model(params);
          const PolicyParams p = to_policy(policy);
          const QuantizeMode mode = parse_quantize(quantize);
          PolicyEvalResult r;
          {
            py::gil_scoped_release release;
            r = simulate_policy(set.trials, p, model, mode);
          }
          return result_dict(r);
        },
        py::arg("trials"), py::arg("policy"), py::arg("quantize") = "per-sample", py::arg("params") = py::none());

  m.def("grid",
        [](const std::string& trials, int time_stride, double p_step, int threads, const std::string& quantize,
           const std::optional<std::string>& params) {
          const TrialSet set = to_trials(trials);
          const GazeModel model = to_model(params);
          const QuantizeMode mode = parse_quantize(quantize);
          GridSpec spec;
          spec.time_stride = time_stride;
          spec.p_step = p_step;
          std::ostringstream out;
          {
            py::gil_scoped_release release;
            const ReplayCache cache(set.trials, model);
            write_results_csv(out, grid_search(cache, grid_policies(spec), mode, threads));
          }
          return out.str();
        },
        py::arg("trials"), py::arg("time_stride") = 1, py::arg("p_step") = 0.1, py::arg("threads") = 0,
        py::arg("quantize") = "per-sample", py::arg("params") = py::none());

  py::class_<GatewaySession>(m, "GatewaySession")
      .def(py::init([](const PolicyTuple& policy, const std::string& quantize, bool include_posterior,
                       const std::optional<std::string>& params) {
             GatewayOptions opts;
             opts.engine.policy = to_policy(policy);
             opts.engine.quantize = parse_quantize(quantize);
             opts.include_posterior = include_posterior;
             return GatewaySession(std::make_shared<const GazeModel>(to_model(params)), opts);
           }),
           py::arg("policy") = PolicyTuple{500, 500, 500, 1}, py::arg("quantize") = "per-sample",
           py::arg("include_posterior") = true, py::arg("params") = py::none())
      .def("handle", [](GatewaySession& s, const std::string& payload) { return s.handle(payload); },
           py::arg("payload"))
      .def_property_readonly("closed", &GatewaySession::closed);
}
