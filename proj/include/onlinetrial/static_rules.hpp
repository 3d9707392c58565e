#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "onlinetrial/errors.hpp"

namespace onlinetrial {

inline void check_p_values(std::span<const double> p_values) {
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p-values must lie in [0, 1]");
  }
}

// Result of a step-up rule: the rejected indices (ascending) plus the realized
// rejection cutoff c with the property  rejected(i) <=> p_i <= c.  When
// nothing is rejected the cutoff is 0.
struct StepUpResult {
  std::vector<int> rejected;
  double cutoff = 0.0;
};

// Benjamini-Hochberg step-up rule at level alpha: with sorted p-values
// p_(1) <= ... <= p_(m), find k = max{ i : p_(i) <= i*alpha/m } and reject
// the k smallest.  The emitted cutoff k*alpha/m separates rejected from
// non-rejected points: step-up maximality forces p_(k+1) > (k+1)*alpha/m,
// and p_(k+1) <= k*alpha/m would contradict k being the maximum, so every
// non-rejected p-value exceeds the cutoff.
inline StepUpResult bh_with_cutoff(std::span<const double> p_values, double alpha) {
  check_p_values(p_values);
  if (!(alpha >= 0.0)) throw DomainError("alpha must be non-negative");
  const int m = static_cast<int>(p_values.size());
  StepUpResult result;
  if (m == 0) return result;
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double pa = p_values[static_cast<std::size_t>(a)];
    const double pb = p_values[static_cast<std::size_t>(b)];
    if (pa != pb) return pa < pb;
    return a < b;
  });
  int k = 0;
  for (int rank = 1; rank <= m; ++rank) {
    const double p = p_values[static_cast<std::size_t>(order[static_cast<std::size_t>(rank - 1)])];
    if (p <= static_cast<double>(rank) * alpha / static_cast<double>(m)) k = rank;
  }
  result.rejected.assign(order.begin(), order.begin() + k);
  std::sort(result.rejected.begin(), result.rejected.end());
  result.cutoff = (k == 0) ? 0.0 : static_cast<double>(k) * alpha / static_cast<double>(m);
  return result;
}

inline std::vector<int> bh_procedure(std::span<const double> p_values, double alpha) {
  return bh_with_cutoff(p_values, alpha).rejected;
}

// Storey null-proportion estimate at threshold lambda:
//   pi0_hat = (1 + #{ p > lambda }) / (m * (1 - lambda))
inline double storey_pi0(std::span<const double> p_values, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
  const int m = static_cast<int>(p_values.size());
  if (m == 0) throw DomainError("pi0 estimate requires at least one p-value");
  int above = 0;
  for (double p : p_values) {
    if (p > lambda) ++above;
  }
  return static_cast<double>(1 + above) / (static_cast<double>(m) * (1.0 - lambda));
}

// Storey-adjusted Benjamini-Hochberg: BH run at level alpha / pi0_hat.
inline StepUpResult storey_bh_with_cutoff(std::span<const double> p_values, double alpha,
                                          double lambda) {
  check_p_values(p_values);
  if (p_values.empty()) return {};
  const double pi0 = storey_pi0(p_values, lambda);
  return bh_with_cutoff(p_values, alpha / pi0);
}

inline std::vector<int> storey_bh(std::span<const double> p_values, double alpha,
                                  double lambda) {
  return storey_bh_with_cutoff(p_values, alpha, lambda).rejected;
}

// Reject every p <= alpha.
inline std::vector<int> uncorrected(std::span<const double> p_values, double alpha) {
  check_p_values(p_values);
  std::vector<int> rejected;
  for (int i = 0; i < static_cast<int>(p_values.size()); ++i) {
    if (p_values[static_cast<std::size_t>(i)] <= alpha) rejected.push_back(i);
  }
  return rejected;
}

// Reject every p <= alpha / n_bound (the horizon-wide union bound).
inline std::vector<int> bonferroni_rule(std::span<const double> p_values, double alpha,
                                        int n_bound) {
  if (n_bound < 1) throw DomainError("horizon must be at least 1");
  return uncorrected(p_values, alpha / static_cast<double>(n_bound));
}

}  // namespace onlinetrial
