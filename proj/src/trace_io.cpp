#include "gazedwell/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gazedwell {

using nlohmann::json;

FormatError::FormatError(int line, std::string field, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? std::string() : "field '" + field + "': ") + message),
      line_(line),
      field_(std::move(field)) {}

namespace {

const json& require(const json& j, const char* key, int line, const std::string& prefix = {}) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(line, prefix + key, "missing required field");
  }
  return j.at(key);
}

double number(const json& j, const std::string& field, int line) {
  if (!j.is_number()) throw FormatError(line, field, "expected a number");
  return j.get<double>();
}

BoundingBox box_from_json(const json& j, const std::string& field, int line) {
  BoundingBox b{number(require(j, "left", line, field + "."), field + ".left", line),
                number(require(j, "top", line, field + "."), field + ".top", line),
                number(require(j, "width", line, field + "."), field + ".width", line),
                number(require(j, "height", line, field + "."), field + ".height", line)};
  if (!(b.width > 0.0) || !(b.height > 0.0)) {
    throw FormatError(line, field, "width and height must be positive");
  }
  return b;
}

json box_fields(const BoundingBox& b) {
  return {{"left", b.left}, {"top", b.top}, {"width", b.width}, {"height", b.height}};
}

json samples_to_json(const GazeTrace& trace) {
  json arr = json::array();
  for (const auto& s : trace) arr.push_back(json::array({s.t, s.point.x, s.point.y}));
  return arr;
}

GazeTrace samples_from_json(const json& j, const std::string& field, int line) {
  if (!j.is_array()) throw FormatError(line, field, "expected an array of [t,x,y]");
  GazeTrace trace;
  trace.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    const auto& s = j[i];
    const std::string where = field + "[" + std::to_string(i) + "]";
    if (!s.is_array() || s.size() != 3 || !s[0].is_number_integer() || !s[1].is_number() ||
        !s[2].is_number()) {
      throw FormatError(line, where, "expected [t,x,y] with integer t");
    }
    GazeSample g{s[0].get<int64_t>(), {s[1].get<double>(), s[2].get<double>()}};
    if (!trace.empty() && g.t != trace.back().t + 1) {
      throw FormatError(line, where,
                        "sample index " + std::to_string(g.t) + " does not follow " +
                            std::to_string(trace.back().t) + " by exactly 1");
    }
    trace.push_back(g);
  }
  return trace;
}

}  // namespace

void validate(const TrialRecord& trial) {
  validate(trial.layout);
  if (!trial.buttons.empty()) validate(trial.buttons);
  if (!trial.layout.has_link(trial.true_target)) {
    throw std::invalid_argument("true_target " + std::to_string(trial.true_target) +
                                " is not a link on the page");
  }
  if (trial.pre_select.empty()) throw std::invalid_argument("pre_select is empty");
  for (const GazeTrace* trace : {&trial.pre_select, &trial.post_select}) {
    for (size_t i = 1; i < trace->size(); ++i) {
      if ((*trace)[i].t != (*trace)[i - 1].t + 1) {
        throw std::invalid_argument("gaze sample indices must increase by exactly 1");
      }
    }
  }
}

json layout_to_json(const PageLayout& layout, std::span<const ButtonRegion> buttons) {
  json links = json::array();
  for (const auto& l : layout.links) {
    json jl = box_fields(l.bbox);
    jl["id"] = l.id;
    if (!l.label.empty()) jl["label"] = l.label;
    links.push_back(std::move(jl));
  }
  json out = {{"screen", {layout.screen_width, layout.screen_height}}, {"links", std::move(links)}};
  if (!buttons.empty()) {
    json jb = json::array();
    for (const auto& b : buttons) {
      json e = box_fields(b.bbox);
      e["name"] = std::string(command_name(b.command));
      jb.push_back(std::move(e));
    }
    out["buttons"] = std::move(jb);
  }
  return out;
}

PageLayout layout_from_json(const json& j, std::vector<ButtonRegion>* buttons, int line) {
  if (!j.is_object()) throw FormatError(line, "layout", "expected an object");
  PageLayout layout;
  const json& screen = require(j, "screen", line, "layout.");
  if (!screen.is_array() || screen.size() != 2 || !screen[0].is_number() || !screen[1].is_number()) {
    throw FormatError(line, "layout.screen", "expected [width, height]");
  }
  layout.screen_width = screen[0].get<double>();
  layout.screen_height = screen[1].get<double>();
  if (!(layout.screen_width > 0.0) || !(layout.screen_height > 0.0)) {
    throw FormatError(line, "layout.screen", "screen dimensions must be positive");
  }
  const json& links = require(j, "links", line, "layout.");
  if (!links.is_array() || links.empty()) {
    throw FormatError(line, "layout.links", "expected a non-empty array");
  }
  for (size_t i = 0; i < links.size(); ++i) {
    const std::string field = "layout.links[" + std::to_string(i) + "]";
    const json& jl = links[i];
    const json& id = require(jl, "id", line, field + ".");
    if (!id.is_number_integer() || id.get<int>() != static_cast<int>(i + 1)) {
      throw FormatError(line, field + ".id", "link ids must be 1..M in document order");
    }
    Hyperlink link{id.get<int>(), box_from_json(jl, field, line), {}};
    if (jl.contains("label")) {
      if (!jl["label"].is_string()) throw FormatError(line, field + ".label", "expected a string");
      link.label = jl["label"].get<std::string>();
    }
    layout.links.push_back(std::move(link));
  }
  if (buttons) {
    buttons->clear();
    if (j.contains("buttons")) {
      const json& jb = j["buttons"];
      if (!jb.is_array()) throw FormatError(line, "layout.buttons", "expected an array");
      for (size_t i = 0; i < jb.size(); ++i) {
        const std::string field = "layout.buttons[" + std::to_string(i) + "]";
        const json& name = require(jb[i], "name", line, field + ".");
        const auto cmd = name.is_string() ? parse_command(name.get<std::string>()) : std::nullopt;
        if (!cmd) throw FormatError(line, field + ".name", "unknown command button");
        buttons->push_back({*cmd, box_from_json(jb[i], field, line)});
      }
      try {
        validate(*buttons);
      } catch (const std::invalid_argument& e) {
        throw FormatError(line, "layout.buttons", e.what());
      }
    }
  }
  return layout;
}

json trial_to_json(const TrialRecord& trial) {
  return {{"layout", layout_to_json(trial.layout, trial.buttons)},
          {"pre_select", samples_to_json(trial.pre_select)},
          {"post_select", samples_to_json(trial.post_select)},
          {"true_target", trial.true_target},
          {"meta", trial.meta}};
}

TrialRecord trial_from_json(const json& j, int line) {
  if (!j.is_object()) throw FormatError(line, "", "trial record must be an object");
  TrialRecord trial;
  trial.layout = layout_from_json(require(j, "layout", line), &trial.buttons, line);
  trial.pre_select = samples_from_json(require(j, "pre_select", line), "pre_select", line);
  if (trial.pre_select.empty()) throw FormatError(line, "pre_select", "must not be empty");
  trial.post_select = samples_from_json(require(j, "post_select", line), "post_select", line);
  const json& target = require(j, "true_target", line);
  if (!target.is_number_integer()) throw FormatError(line, "true_target", "expected a link id");
  trial.true_target = target.get<int>();
  if (!trial.layout.has_link(trial.true_target)) {
    throw FormatError(line, "true_target", "no link with id " + std::to_string(trial.true_target));
  }
  if (j.contains("meta")) trial.meta = j["meta"];
  return trial;
}

void write_trials(std::ostream& out, const TrialSet& set) {
  const json header = {{"format", "gdw-trace"},
                       {"version", set.header.version},
                       {"ts_ms", set.header.ts_ms},
                       {"duration_unit", set.header.duration_unit}};
  out << header.dump() << '\n';
  for (const auto& trial : set.trials) out << trial_to_json(trial).dump() << '\n';
}

TrialSet read_trials(std::istream& in) {
  TrialSet set;
  std::string text;
  int line = 0;
  bool have_header = false;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw FormatError(line, "", std::string("invalid JSON: ") + e.what());
    }
    if (!have_header) {
      const json& version = require(j, "version", line);
      if (!version.is_number_integer() || version.get<int>() != kTraceFormatVersion) {
        throw FormatError(line, "version", "unsupported trace format version");
      }
      set.header.version = version.get<int>();
      set.header.ts_ms = number(require(j, "ts_ms", line), "ts_ms", line);
      if (!(set.header.ts_ms > 0.0)) throw FormatError(line, "ts_ms", "must be positive");
      const json& unit = require(j, "duration_unit", line);
      if (!unit.is_string()) throw FormatError(line, "duration_unit", "expected a string");
      set.header.duration_unit = unit.get<std::string>();
      have_header = true;
      continue;
    }
    set.trials.push_back(trial_from_json(j, line));
  }
  if (!have_header) throw FormatError(0, "version", "trace file has no header record");
  return set;
}

void save_trials(const TrialSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trials(out, set);
  if (!out) throw std::runtime_error("error writing " + path.string());
}

TrialSet load_trials(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_trials(in);
}

// ---------------------------------------------------------------------------
// Model parameter files

namespace {

constexpr const char* kModelFormat = "gdw-params/1";

constexpr std::array<std::pair<const char*, std::array<Label, 2>>, 6> kSegRows{{
    {"ff", {Label::Fixation, Label::Fixation}},
    {"fs", {Label::Fixation, Label::Saccade}},
    {"fo", {Label::Fixation, Label::Outlier}},
    {"sf", {Label::Saccade, Label::Fixation}},
    {"ss", {Label::Saccade, Label::Saccade}},
    {"of", {Label::Outlier, Label::Fixation}},
}};

constexpr std::array<const char*, 3> kBehaviorNames{"on", "near", "away"};

std::string join(std::span<const double> values) {
  std::string out;
  char buf[64];
  for (size_t i = 0; i < values.size(); ++i) {
    // Shortest text that reads back to the same double.
    const auto res = std::to_chars(buf, buf + sizeof buf, values[i]);
    if (i) out += ' ';
    out.append(buf, res.ptr);
  }
  return out;
}

}  // namespace

std::string format_model(const GazeModel& model) {
  std::ostringstream out;
  const auto& seg = model.seg;
  const auto& in = model.intent;
  auto line = [&](const std::string& key, std::span<const double> values) {
    out << key << " = " << join(values) << '\n';
  };
  out << "# gaze model parameters; durations in units of ts_ms when duration_unit = samples\n";
  out << "format = " << kModelFormat << '\n';
  line("ts_ms", std::array{model.sample_period_ms});
  out << "duration_unit = " << (in.duration_unit_ms == 1.0 ? "ms" : kDurationUnitSamples) << '\n';
  line("intent.duration_unit_ms", std::array{in.duration_unit_ms});
  line("seg.screen", std::array{seg.screen_width, seg.screen_height});
  for (const auto& [name, pair] : kSegRows) {
    std::array<double, 3> row{};
    for (int l0 = 0; l0 < 3; ++l0) row[l0] = seg.p(pair[0], pair[1], static_cast<Label>(l0));
    line(std::string("seg.p.") + name, row);
  }
  line("seg.sigma_f", std::array{seg.sigma_f.xx, seg.sigma_f.yy});
  line("seg.sigma_s", std::array{seg.sigma_s.xx, seg.sigma_s.yy});
  line("seg.sigma_o", std::array{seg.sigma_o.xx, seg.sigma_o.yy});
  for (int k = 0; k < 3; ++k) {
    line(std::string("intent.transition.") + kBehaviorNames[k], in.behavior_transition[k]);
  }
  line("intent.p_s", std::array{in.p_s});
  line("intent.beta_x", in.beta_x);
  line("intent.beta_y", in.beta_y);
  line("intent.sigma_x", in.sigma_x);
  line("intent.sigma_y", in.sigma_y);
  line("intent.mu_d", in.mu_d);
  line("intent.sigma_d", in.sigma_d);
  line("intent.pi", in.pi);
  return out.str();
}

GazeModel parse_model(const std::string& text) {
  std::map<std::string, std::pair<int, std::string>> entries;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw FormatError(line, "", "expected 'key = value'");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(raw.substr(0, eq));
    if (entries.count(key)) throw FormatError(line, key, "duplicate key");
    entries[key] = {line, trim(raw.substr(eq + 1))};
  }

  std::set<std::string> used;
  auto get = [&](const std::string& key) -> const std::pair<int, std::string>& {
    auto it = entries.find(key);
    if (it == entries.end()) throw FormatError(0, key, "missing parameter");
    used.insert(key);
    return it->second;
  };
  auto numbers = [&](const std::string& key, size_t count) {
    const auto& [ln, value] = get(key);
    std::istringstream vs(value);
    std::vector<double> out;
    std::string tok;
    while (vs >> tok) {
      try {
        size_t pos = 0;
        out.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw FormatError(ln, key, "not a number: '" + tok + "'");
      }
    }
    if (out.size() != count) {
      throw FormatError(ln, key, "expected " + std::to_string(count) + " values");
    }
    return out;
  };
  auto copy = [](const std::vector<double>& v, auto& arr) {
    std::copy(v.begin(), v.end(), arr.begin());
  };

  if (get("format").second != kModelFormat) {
    throw FormatError(get("format").first, "format", "unsupported parameter format");
  }
  GazeModel model;
  model.sample_period_ms = numbers("ts_ms", 1)[0];
  const std::string unit = get("duration_unit").second;
  model.intent.duration_unit_ms = numbers("intent.duration_unit_ms", 1)[0];
  if (unit == "ms" && model.intent.duration_unit_ms != 1.0) {
    throw FormatError(get("duration_unit").first, "duration_unit",
                      "unit 'ms' requires intent.duration_unit_ms = 1");
  }
  if (unit != "ms" && unit != kDurationUnitSamples) {
    throw FormatError(get("duration_unit").first, "duration_unit", "expected 'samples' or 'ms'");
  }

  auto& seg = model.seg;
  const auto screen = numbers("seg.screen", 2);
  seg.screen_width = screen[0];
  seg.screen_height = screen[1];
  for (const auto& [name, pair] : kSegRows) {
    const auto row = numbers(std::string("seg.p.") + name, 3);
    for (int l0 = 0; l0 < 3; ++l0) seg.p(pair[0], pair[1], static_cast<Label>(l0)) = row[l0];
  }
  auto cov = [&](const char* key) {
    const auto v = numbers(key, 2);
    return DiagCov{v[0], v[1]};
  };
  seg.sigma_f = cov("seg.sigma_f");
  seg.sigma_s = cov("seg.sigma_s");
  seg.sigma_o = cov("seg.sigma_o");

  auto& in_p = model.intent;
  for (int k = 0; k < 3; ++k) {
    copy(numbers(std::string("intent.transition.") + kBehaviorNames[k], 4),
         in_p.behavior_transition[k]);
  }
  in_p.p_s = numbers("intent.p_s", 1)[0];
  copy(numbers("intent.beta_x", 2), in_p.beta_x);
  copy(numbers("intent.beta_y", 2), in_p.beta_y);
  copy(numbers("intent.sigma_x", 2), in_p.sigma_x);
  copy(numbers("intent.sigma_y", 2), in_p.sigma_y);
  copy(numbers("intent.mu_d", 3), in_p.mu_d);
  copy(numbers("intent.sigma_d", 3), in_p.sigma_d);
  copy(numbers("intent.pi", 3), in_p.pi);

  for (const auto& [key, entry] : entries) {
    if (!used.count(key)) throw FormatError(entry.first, key, "unknown parameter");
  }
  try {
    validate(model.seg);
    validate(model.intent);
  } catch (const std::invalid_argument& e) {
    throw FormatError(0, "", e.what());
  }
  if (!(model.sample_period_ms > 0.0)) throw FormatError(0, "ts_ms", "must be positive");
  return model;
}

void save_model(const GazeModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_model(model);
}

GazeModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace gazedwell
