#include "gazedwell/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gazedwell {
namespace {

double parse_number(std::string_view text, std::string_view what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("cannot parse " + std::string(what) + " from '" +
                                std::string(text) + "'");
  }
  return value;
}

}  // namespace

void validate(const PolicyParams& policy) {
  if (!(policy.t_min > 0.0 && policy.t_min <= policy.t_break && policy.t_break <= policy.t_max)) {
    throw std::invalid_argument("policy needs 0 < t_min <= t_break <= t_max (got " +
                                format_policy(policy) + ")");
  }
  if (!(policy.p_break >= 0.0 && policy.p_break <= 1.0)) {
    throw std::invalid_argument("policy p_break must lie in [0, 1]");
  }
}

PolicyParams parse_policy(std::string_view literal) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    const size_t comma = literal.find(',', start);
    parts.push_back(literal.substr(start, comma == std::string_view::npos ? literal.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 4) {
    throw std::invalid_argument("policy literal must be tmax,tmin,tbreak,pbreak (got '" +
                                std::string(literal) + "')");
  }
  PolicyParams policy{parse_number(parts[0], "tmax"), parse_number(parts[1], "tmin"),
                      parse_number(parts[2], "tbreak"), parse_number(parts[3], "pbreak")};
  validate(policy);
  return policy;
}

std::string format_policy(const PolicyParams& policy) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%g,%g,%g,%g", policy.t_max, policy.t_min, policy.t_break,
                policy.p_break);
  return buf;
}

double nominal_dwell(double p, const PolicyParams& policy) {
  validate(policy);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability must lie in [0, 1]");
  if (p == 0.0) return policy.t_max;
  if (p <= policy.p_break) {
    if (p == policy.p_break) return policy.t_break;
    return policy.t_max - (policy.t_max - policy.t_break) * (p / policy.p_break);
  }
  if (p == 1.0) return policy.t_min;
  return policy.t_break -
         (policy.t_break - policy.t_min) * ((p - policy.p_break) / (1.0 - policy.p_break));
}

QuantizeMode parse_quantize(std::string_view literal) {
  if (literal == "per-sample") return QuantizeMode::per_sample();
  constexpr std::string_view kCoarse = "coarse:";
  if (literal.substr(0, kCoarse.size()) == kCoarse) {
    const double q = parse_number(literal.substr(kCoarse.size()), "coarse step");
    if (q >= 1.0 && q == std::floor(q) && q < 1e6) return QuantizeMode::coarse(static_cast<int>(q));
  }
  throw std::invalid_argument("quantize mode must be 'per-sample' or 'coarse:q' (got '" +
                              std::string(literal) + "')");
}

std::string format_quantize(QuantizeMode mode) {
  return mode.step == 1 ? "per-sample" : "coarse:" + std::to_string(mode.step);
}

int quantize_dwell(double t_ms, QuantizeMode mode, double sample_period_ms) {
  if (!(t_ms > 0.0)) throw std::invalid_argument("dwell time must be positive");
  if (mode.step < 1) throw std::invalid_argument("quantization step must be >= 1 sample");
  if (mode.step == 1) {
    return std::max(1, static_cast<int>(std::floor(t_ms / sample_period_ms + 0.5)));
  }
  const int q = mode.step;
  const int blocks = static_cast<int>(std::floor(t_ms / (q * sample_period_ms)));
  return std::max(q, q * blocks);
}

DwellAssignment assign_dwells(const IntentPosterior& posterior, const PolicyParams& policy,
                              QuantizeMode mode, double sample_period_ms) {
  validate(policy);
  DwellAssignment out;
  out.links.reserve(posterior.probs.size());
  for (size_t i = 0; i < posterior.probs.size(); ++i) {
    const double p = std::clamp(posterior.probs[i], 0.0, 1.0);
    const double nominal = nominal_dwell(p, policy);
    out.links.push_back({static_cast<LinkId>(i + 1), quantize_dwell(nominal, mode, sample_period_ms),
                         nominal, posterior.probs[i]});
  }
  return out;
}

PolicyParams policy_family_I(double p_break) {
  if (!(p_break >= 0.0 && p_break <= kFamilyMaxPBreak)) {
    throw std::invalid_argument("family I p_break must lie in [0, 0.93]");
  }
  return {500.0, kFamilyMinTMinMs, 50.0, p_break};
}

PolicyParams policy_family_II(double t_min_ms) {
  if (!(t_min_ms >= kFamilyMinTMinMs && t_min_ms <= 500.0)) {
    throw std::invalid_argument("family II t_min must lie in [16.67, 500] ms");
  }
  return {500.0, t_min_ms, t_min_ms, 1.0};
}

PolicyParams uniform_policy(double t_ms) { return {t_ms, t_ms, t_ms, 1.0}; }

}  // namespace gazedwell
