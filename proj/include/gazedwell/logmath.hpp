#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace gazedwell {

// Sampling period of a 60 Hz gaze tracker, as quoted by the tracker vendor.
inline constexpr double kSamplePeriodMs = 16.67;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

inline double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// log N(x; mean, var) for independent axes; var entries are variances.
inline double log_normal2_diag(double dx, double dy, double var_x, double var_y) {
  return -kLog2Pi - 0.5 * std::log(var_x * var_y) -
         0.5 * (dx * dx / var_x + dy * dy / var_y);
}

}  // namespace gazedwell
