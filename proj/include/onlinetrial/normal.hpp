#pragma once

#include <cmath>
#include <numbers>

#include "onlinetrial/errors.hpp"

namespace onlinetrial {

// Standard normal CDF via the complementary error function.  erfc is
// evaluated by the C library to within a couple of ulp, which keeps the
// absolute error of the CDF well below 1e-12 everywhere.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Upper tail P(Z > z) = 1 - Phi(z), computed directly from erfc so that
// large z does not suffer cancellation.
inline double normal_upper_tail(double z) {
  if (!std::isfinite(z)) throw DomainError("p-value requires a finite z-statistic");
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

// Two-sample z-statistic with known sigma:
//   (xbar_treat - xbar_control) / (sigma * sqrt(1/n0 + 1/n))
inline double z_statistic(double xbar_treat, double xbar_control, double sigma,
                          long n, long n0) {
  if (n <= 0 || n0 <= 0) throw DomainError("sample sizes must be positive");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  const double se = sigma * std::sqrt(1.0 / static_cast<double>(n0) +
                                      1.0 / static_cast<double>(n));
  return (xbar_treat - xbar_control) / se;
}

}  // namespace onlinetrial
