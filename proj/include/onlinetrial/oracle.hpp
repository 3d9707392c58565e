#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "onlinetrial/errors.hpp"
#include "onlinetrial/rng.hpp"
#include "onlinetrial/sequential.hpp"
#include "onlinetrial/static_rules.hpp"
#include "onlinetrial/trial.hpp"

// Independent validators shipped with the artifact so results can be
// re-checked in the field.  Each validator is a self-contained closed form or
// a deliberately naive re-implementation: none of them share logic with the
// procedure code they check, beyond primitive arithmetic.

namespace onlinetrial {

struct OracleReport {
  std::string name;
  double expected = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string basis;  // where the expected value comes from
};

inline OracleReport make_report(std::string name, double expected, double observed,
                                double tolerance, std::string basis) {
  OracleReport report;
  report.name = std::move(name);
  report.expected = expected;
  report.observed = observed;
  report.tolerance = tolerance;
  report.passed = std::abs(observed - expected) <= tolerance;
  report.basis = std::move(basis);
  return report;
}

// Level assigned to test i by the discovery-scaled rule with the constant
// discount sequence: alpha * (1/n_bound) * (discoveries + 1).  Written as the
// same arithmetic expression the procedure evaluates, so agreement is exact.
inline double closed_form_lond_level(double alpha, int n_bound, int i, int discoveries) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (n_bound < 1) throw DomainError("horizon must be at least 1");
  if (i < 1 || i > n_bound) throw DomainError("test index out of range");
  if (discoveries < 0 || discoveries >= i) throw DomainError("impossible discovery count");
  return alpha * (1.0 / static_cast<double>(n_bound)) * static_cast<double>(discoveries + 1);
}

// Literal transcription of the step-up definition, quadratic on purpose:
// sort by insertion, find the largest k with p_(k) <= k * alpha / m, reject
// every p-value at or below that order statistic.  Kept free of any code
// shared with the production step-up routine.
inline std::vector<int> naive_bh(const std::vector<double>& p_values, double alpha) {
  const int m = static_cast<int>(p_values.size());
  if (m == 0) return {};

  std::vector<double> sorted = p_values;
  for (int i = 1; i < m; ++i) {
    const double key = sorted[static_cast<std::size_t>(i)];
    int j = i - 1;
    while (j >= 0 && sorted[static_cast<std::size_t>(j)] > key) {
      sorted[static_cast<std::size_t>(j + 1)] = sorted[static_cast<std::size_t>(j)];
      --j;
    }
    sorted[static_cast<std::size_t>(j + 1)] = key;
  }

  int k_star = 0;
  for (int k = 1; k <= m; ++k) {
    if (sorted[static_cast<std::size_t>(k - 1)] <=
        static_cast<double>(k) * alpha / static_cast<double>(m))
      k_star = k;
  }
  if (k_star == 0) return {};

  const double threshold = sorted[static_cast<std::size_t>(k_star - 1)];
  std::vector<int> rejected;
  for (int i = 0; i < m; ++i) {
    if (p_values[static_cast<std::size_t>(i)] <= threshold) rejected.push_back(i);
  }
  return rejected;
}

// Correlation between the z-statistics of two arms whose concurrent-control
// windows share m_overlap of the n control patients (both arms sized n, both
// control windows sized n).  Derivation: with control means C_i over windows
// W_i, Cov(C_1, C_2) = sigma^2 |W_1 ∩ W_2| / n^2 = sigma^2 m / n^2, the
// treatment means are independent of everything else, and Var(Xbar_i - C_i) =
// 2 sigma^2 / n, so
//   corr(Z_1, Z_2) = (sigma^2 m / n^2) / (2 sigma^2 / n) = m / (2n).
inline double analytic_control_correlation(int m_overlap, int n) {
  if (n < 1) throw DomainError("control window size must be positive");
  if (m_overlap < 0 || m_overlap > n) throw DomainError("overlap must lie in [0, n]");
  return static_cast<double>(m_overlap) / (2.0 * static_cast<double>(n));
}

// Familywise error rate of uncorrected testing across K independent true
// nulls: 1 - (1 - alpha)^K.
inline double independent_fwer_closed_form(double alpha, int k_arms) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (k_arms < 1) throw DomainError("need at least one arm");
  return 1.0 - std::pow(1.0 - alpha, static_cast<double>(k_arms));
}

// --- Monte Carlo cross-checks ----------------------------------------------

// Number of disagreements between the production step-up routine and the
// naive transcription over random instances (sizes 1..max_size, mixed-scale
// p-values, randomized alpha).
inline int bh_equivalence_mismatches(int instances, int max_size, std::uint64_t seed) {
  if (instances < 1) throw DomainError("need at least one instance");
  if (max_size < 1) throw DomainError("instance size bound must be positive");
  RandomStream rng(seed);
  int mismatches = 0;
  for (int t = 0; t < instances; ++t) {
    const int m = 1 + rng.bounded(max_size);
    std::vector<double> p_values(static_cast<std::size_t>(m));
    for (double& p : p_values) {
      const double u = rng.uniform01();
      // Half the draws are squeezed toward zero so step-up boundaries are
      // exercised, not just the no-rejection regime.
      p = (rng.uniform01() < 0.5) ? u : u * 0.12;
    }
    const double alpha = 0.01 + 0.3 * rng.uniform01();
    const std::vector<int> fast = bh_procedure(p_values, alpha);
    const std::vector<int> slow = naive_bh(p_values, alpha);
    if (fast != slow) ++mismatches;
  }
  return mismatches;
}

// Sample correlation between the two z-statistics of a two-arm trial with
// the given entry times, under the global null, across replications.
inline double empirical_z_correlation(int entry_gap, int reps, std::uint64_t seed,
                                      int n_per_arm = 50, int duration = 10) {
  if (reps < 2) throw DomainError("need at least two replications");
  TrialConfig config;
  config.k_arms = 2;
  config.n_per_arm = n_per_arm;
  config.duration = duration;
  config.sigma = 1.0;
  config.mu = {0.0, 0.0, 0.0};
  config.entry_times = {0, entry_gap};
  config.alpha = 0.025;
  config.n_bound = 2;
  const AccrualSchedule schedule = build_schedule(config);

  std::vector<double> z1(static_cast<std::size_t>(reps));
  std::vector<double> z2(static_cast<std::size_t>(reps));
  for (int rep = 0; rep < reps; ++rep) {
    RandomStream rng(derive_seed(seed, "oracle-corr", static_cast<std::uint64_t>(rep)));
    const TrialRealization realization = simulate_trial(config, schedule, rng);
    for (const ArmOutcome& outcome : realization.tests) {
      if (outcome.arm == 1) z1[static_cast<std::size_t>(rep)] = outcome.z;
      if (outcome.arm == 2) z2[static_cast<std::size_t>(rep)] = outcome.z;
    }
  }

  double mean1 = 0.0;
  double mean2 = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    mean1 += z1[static_cast<std::size_t>(rep)];
    mean2 += z2[static_cast<std::size_t>(rep)];
  }
  mean1 /= static_cast<double>(reps);
  mean2 /= static_cast<double>(reps);
  double cross = 0.0;
  double var1 = 0.0;
  double var2 = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const double d1 = z1[static_cast<std::size_t>(rep)] - mean1;
    const double d2 = z2[static_cast<std::size_t>(rep)] - mean2;
    cross += d1 * d2;
    var1 += d1 * d1;
    var2 += d2 * d2;
  }
  return cross / std::sqrt(var1 * var2);
}

// Share of global-null replications where uncorrected testing rejects at
// least one of k_arms fully sequential arms.  Thresholds p <= alpha directly,
// bypassing the procedure classes.
inline double empirical_uncorrected_fwer(int k_arms, int reps, std::uint64_t seed,
                                         double alpha = 0.025) {
  if (reps < 1) throw DomainError("need at least one replication");
  TrialConfig config;
  config.k_arms = k_arms;
  config.n_per_arm = 50;
  config.duration = 10;
  config.sigma = 1.0;
  config.mu.assign(static_cast<std::size_t>(k_arms) + 1, 0.0);
  config.entry_times.resize(static_cast<std::size_t>(k_arms));
  for (int i = 0; i < k_arms; ++i)
    config.entry_times[static_cast<std::size_t>(i)] = 10 * i;
  config.alpha = alpha;
  config.n_bound = k_arms;
  const AccrualSchedule schedule = build_schedule(config);

  int hits = 0;
  for (int rep = 0; rep < reps; ++rep) {
    RandomStream rng(derive_seed(seed, "oracle-fwer", static_cast<std::uint64_t>(rep)));
    const TrialRealization realization = simulate_trial(config, schedule, rng);
    for (const ArmOutcome& outcome : realization.tests) {
      if (outcome.p <= alpha) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(reps);
}

// --- Suite ------------------------------------------------------------------

struct OracleSettings {
  int bh_instances = 20000;
  int correlation_reps = 10000;
  int fwer_reps = 10000;
  std::uint64_t seed = 20240614;
};

// Runs every field check and returns one report per check.  All checks are
// deterministic given the settings.
inline std::vector<OracleReport> run_oracle_suite(const OracleSettings& settings) {
  std::vector<OracleReport> reports;

  // Discovery-scaled closed-form levels, replayed through the procedure with
  // one discovery before the eighth test.
  for (double alpha : {0.025, 0.05, 0.1}) {
    Lond lond = Lond::with_defaults(alpha, 20);
    lond.test_one(1e-6);                              // discovery at test 1
    for (int t = 2; t <= 7; ++t) lond.test_one(0.99);  // six accepts
    const double observed = lond.next_level();
    const double expected = closed_form_lond_level(alpha, 20, 8, 1);
    char name[64];
    std::snprintf(name, sizeof(name), "lond_closed_form_level_a%04.0f", alpha * 10000.0);
    reports.push_back(make_report(name, expected, observed, 0.0,
                                  "alpha*(1/20)*2, one discovery before test 8"));
  }

  // Production step-up vs naive transcription.
  const int mismatches = bh_equivalence_mismatches(settings.bh_instances, 25, settings.seed);
  reports.push_back(make_report("bh_step_up_equivalence", 0.0,
                                static_cast<double>(mismatches), 0.0,
                                "set equality over random instances"));

  // Shared-control dependence: corr(Z_i, Z_j) = overlap / (2n).
  struct CorrCase {
    const char* name;
    int entry_gap;
    int overlap;
  };
  for (const CorrCase& corr_case :
       {CorrCase{"control_correlation_full_overlap", 0, 50},
        CorrCase{"control_correlation_half_overlap", 5, 25},
        CorrCase{"control_correlation_disjoint", 10, 0}}) {
    const double expected = analytic_control_correlation(corr_case.overlap, 50);
    const double observed = empirical_z_correlation(
        corr_case.entry_gap, settings.correlation_reps,
        settings.seed + static_cast<std::uint64_t>(corr_case.entry_gap));
    const double se =
        (1.0 - expected * expected) / std::sqrt(static_cast<double>(settings.correlation_reps));
    reports.push_back(make_report(corr_case.name, expected, observed, 3.0 * se,
                                  "overlap/(2n) from shared-control covariance"));
  }

  // Uncorrected familywise error under the global null.
  {
    const double expected = independent_fwer_closed_form(0.025, 20);
    const double observed =
        empirical_uncorrected_fwer(20, settings.fwer_reps, settings.seed + 99);
    const double se = std::sqrt(expected * (1.0 - expected) /
                                static_cast<double>(settings.fwer_reps));
    reports.push_back(make_report("uncorrected_fwer_global_null", expected, observed,
                                  3.0 * se, "1-(1-alpha)^K, K=20 independent nulls"));
  }

  return reports;
}

}  // namespace onlinetrial
