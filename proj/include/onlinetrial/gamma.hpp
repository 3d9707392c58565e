#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "onlinetrial/errors.hpp"

namespace onlinetrial {

enum class GammaKind {
  kConstant,  // gamma_i = 1/n
  kPowerLaw,  // gamma_i proportional to 1/i^exponent
  kLordLog,   // gamma_i proportional to log(max(i,2)) / (i * exp(sqrt(log i)))
};

// A discount sequence gamma_1..gamma_n normalized so that its values sum to
// one over the finite horizon n.  Every budget-spreading rule in this library
// consumes its weights through one of these.
struct GammaSeq {
  GammaKind kind = GammaKind::kConstant;
  double exponent = 0.0;       // meaningful for kPowerLaw only
  std::vector<double> values;  // size n, non-negative, sums to 1

  int size() const { return static_cast<int>(values.size()); }

  // Sum of the first t values (t in [0, size]).
  double cumulative(int t) const {
    if (t < 0 || t > size()) throw DomainError("gamma cumulative index out of range");
    double s = 0.0;
    for (int i = 0; i < t; ++i) s += values[static_cast<std::size_t>(i)];
    return s;
  }
};

inline GammaSeq make_gamma(GammaKind kind, int n_bound, double exponent = 1.6) {
  if (n_bound < 1) throw DomainError("gamma horizon must be at least 1");
  GammaSeq g;
  g.kind = kind;
  g.values.resize(static_cast<std::size_t>(n_bound));
  switch (kind) {
    case GammaKind::kConstant: {
      // 1/n is already normalized; assigning it directly keeps the values
      // exact in double precision (no divide-by-computed-sum round-off).
      const double v = 1.0 / n_bound;
      std::fill(g.values.begin(), g.values.end(), v);
      g.exponent = 0.0;
      return g;
    }
    case GammaKind::kPowerLaw: {
      if (!(exponent > 0.0)) throw DomainError("power-law exponent must be positive");
      g.exponent = exponent;
      double sum = 0.0;
      for (int i = 1; i <= n_bound; ++i) {
        const double raw = 1.0 / std::pow(static_cast<double>(i), exponent);
        g.values[static_cast<std::size_t>(i - 1)] = raw;
        sum += raw;
      }
      for (double& v : g.values) v /= sum;
      return g;
    }
    case GammaKind::kLordLog: {
      double sum = 0.0;
      for (int i = 1; i <= n_bound; ++i) {
        const double di = static_cast<double>(i);
        const double raw =
            std::log(std::max(di, 2.0)) / (di * std::exp(std::sqrt(std::log(di))));
        g.values[static_cast<std::size_t>(i - 1)] = raw;
        sum += raw;
      }
      for (double& v : g.values) v /= sum;
      return g;
    }
  }
  throw DomainError("unknown gamma kind");
}

inline std::string gamma_kind_name(GammaKind kind) {
  switch (kind) {
    case GammaKind::kConstant: return "constant";
    case GammaKind::kPowerLaw: return "powerlaw";
    case GammaKind::kLordLog: return "lordlog";
  }
  return "unknown";
}

}  // namespace onlinetrial
