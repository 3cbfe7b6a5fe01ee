#pragma once

#include <cmath>
#include <limits>

namespace uplift::stats {

// Largest double strictly below 1. Probabilities are clamped into
// [kProbFloor, kProbCeil] so downstream logs and ratios stay finite while
// sigma(40) still reports >= 1 - 1e-15.
inline const double kProbCeil = std::nextafter(1.0, 0.0);
inline constexpr double kProbFloor = 1e-300;

// log(1 + exp(x)) without overflow.
inline double log1pexp(double x) {
  if (x > 35.0) return x;
  if (x < -35.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

// Numerically stable 1/(1 + exp(-x)), clamped into the open unit interval.
inline double logistic(double x) {
  double p;
  if (x >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    p = e / (1.0 + e);
  }
  if (p < kProbFloor) return kProbFloor;
  if (p > kProbCeil) return kProbCeil;
  return p;
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Two-sided p-value of a standard normal statistic: 2 * (1 - Phi(|z|)).
inline double two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

// Upper quantile of the standard normal (bisection on normal_cdf; plenty for
// the alpha values used in split testing).
inline double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace uplift::stats
