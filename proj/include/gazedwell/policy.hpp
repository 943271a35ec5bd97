#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gazedwell/geometry.hpp"
#include "gazedwell/intent.hpp"
#include "gazedwell/logmath.hpp"

namespace gazedwell {

// Piecewise-linear dwell policy: h(0) = t_max, h(p_break) = t_break,
// h(1) = t_min, linear in between. Times in milliseconds.
struct PolicyParams {
  double t_max = 500.0;
  double t_min = 500.0;
  double t_break = 500.0;
  double p_break = 1.0;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

// Throws std::invalid_argument unless 0 < t_min <= t_break <= t_max and
// p_break lies in [0, 1].
void validate(const PolicyParams& policy);

// `tmax,tmin,tbreak,pbreak`, e.g. "500,16.67,50,0.3".
PolicyParams parse_policy(std::string_view literal);
std::string format_policy(const PolicyParams& policy);

double nominal_dwell(double p, const PolicyParams& policy);

struct QuantizeMode {
  int step = 1;  // 1: nearest sample; q > 1: floor to a multiple of q samples

  static QuantizeMode per_sample() { return {1}; }
  static QuantizeMode coarse(int q) { return {q}; }

  friend bool operator==(const QuantizeMode&, const QuantizeMode&) = default;
};

// "per-sample" or "coarse:q".
QuantizeMode parse_quantize(std::string_view literal);
std::string format_quantize(QuantizeMode mode);

// Dwell in samples: round-half-up (at least 1) per sample, or
// q * floor(t / (q * T_s)) (at least q) in coarse mode.
int quantize_dwell(double t_ms, QuantizeMode mode, double sample_period_ms = kSamplePeriodMs);

struct LinkDwell {
  LinkId id = 1;
  int samples = 1;
  double nominal_ms = 0.0;
  double posterior = 0.0;

  double actual_ms(double sample_period_ms = kSamplePeriodMs) const {
    return samples * sample_period_ms;
  }
  friend bool operator==(const LinkDwell&, const LinkDwell&) = default;
};

struct DwellAssignment {
  std::vector<LinkDwell> links;  // links[m - 1] for link id m

  int samples(LinkId id) const { return links.at(static_cast<size_t>(id - 1)).samples; }
  friend bool operator==(const DwellAssignment&, const DwellAssignment&) = default;
};

DwellAssignment assign_dwells(const IntentPosterior& posterior, const PolicyParams& policy,
                              QuantizeMode mode, double sample_period_ms = kSamplePeriodMs);

inline constexpr double kFamilyMaxPBreak = 0.93;
inline constexpr double kFamilyMinTMinMs = 16.67;

// [500, 16.67, 50, p_break], p_break in [0, 0.93].
PolicyParams policy_family_I(double p_break);
// [500, t_min, t_min, 1], t_min in [16.67, 500] ms.
PolicyParams policy_family_II(double t_min_ms);

PolicyParams uniform_policy(double t_ms);

}  // namespace gazedwell
