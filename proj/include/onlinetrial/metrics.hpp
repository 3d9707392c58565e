#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "onlinetrial/batch.hpp"
#include "onlinetrial/errors.hpp"
#include "onlinetrial/rng.hpp"
#include "onlinetrial/scenario.hpp"
#include "onlinetrial/sequential.hpp"
#include "onlinetrial/static_rules.hpp"
#include "onlinetrial/trial.hpp"

namespace onlinetrial {

// --- Algorithm roster -------------------------------------------------------

enum class AlgorithmKind {
  kUncorrected,
  kBonferroni,
  kBh,
  kLond,
  kLord,
  kSaffron,
  kAddis,
  kAddisSpending,
  kBatchBh,
  kBatchPrds,
  kBatchStBh,
};

inline const char* algorithm_label(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kUncorrected: return "uncorrected";
    case AlgorithmKind::kBonferroni: return "bonferroni";
    case AlgorithmKind::kBh: return "bh";
    case AlgorithmKind::kLond: return "lond";
    case AlgorithmKind::kLord: return "lord";
    case AlgorithmKind::kSaffron: return "saffron";
    case AlgorithmKind::kAddis: return "addis";
    case AlgorithmKind::kAddisSpending: return "addis_spending";
    case AlgorithmKind::kBatchBh: return "batch_bh";
    case AlgorithmKind::kBatchPrds: return "batch_prds";
    case AlgorithmKind::kBatchStBh: return "batch_stbh";
  }
  throw DomainError("unknown algorithm kind");
}

inline AlgorithmKind algorithm_from_label(const std::string& label) {
  if (label == "uncorrected") return AlgorithmKind::kUncorrected;
  if (label == "bonferroni") return AlgorithmKind::kBonferroni;
  if (label == "bh") return AlgorithmKind::kBh;
  if (label == "lond") return AlgorithmKind::kLond;
  if (label == "lord") return AlgorithmKind::kLord;
  if (label == "saffron") return AlgorithmKind::kSaffron;
  if (label == "addis") return AlgorithmKind::kAddis;
  if (label == "addis_spending") return AlgorithmKind::kAddisSpending;
  if (label == "batch_bh") return AlgorithmKind::kBatchBh;
  if (label == "batch_prds") return AlgorithmKind::kBatchPrds;
  if (label == "batch_stbh") return AlgorithmKind::kBatchStBh;
  throw ConfigError("unknown algorithm: " + label);
}

inline std::vector<AlgorithmKind> all_algorithms() {
  return {AlgorithmKind::kUncorrected,   AlgorithmKind::kBonferroni,
          AlgorithmKind::kBh,            AlgorithmKind::kLond,
          AlgorithmKind::kLord,          AlgorithmKind::kSaffron,
          AlgorithmKind::kAddis,         AlgorithmKind::kAddisSpending,
          AlgorithmKind::kBatchBh,       AlgorithmKind::kBatchPrds,
          AlgorithmKind::kBatchStBh};
}

inline bool is_batch_algorithm(AlgorithmKind kind) {
  return kind == AlgorithmKind::kBatchBh || kind == AlgorithmKind::kBatchPrds ||
         kind == AlgorithmKind::kBatchStBh;
}

// The batch rules need tests to arrive in simultaneous groups; staggered and
// fully sequential entries produce singleton completions, where we run only
// the sequential and offline rules.
inline bool algorithm_applies(AlgorithmKind kind, EntryKind entry) {
  if (!is_batch_algorithm(kind)) return true;
  return entry == EntryKind::kAllAtOnce || entry == EntryKind::kBatch5;
}

// One algorithm plus optional parameter overrides.  Unset fields fall back
// to each procedure's published defaults; setting a field the procedure does
// not have is a configuration error.
struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::kLond;
  std::optional<GammaKind> gamma_kind;
  std::optional<double> gamma_exponent;
  std::optional<double> lambda;
  std::optional<double> tau;
  std::optional<double> w0;
  std::optional<double> b0;
};

namespace detail {

inline void reject_override(const AlgorithmSpec& spec, bool gamma_ok, bool lambda_ok,
                            bool tau_ok, bool w0_ok, bool b0_ok) {
  const std::string label = algorithm_label(spec.kind);
  if (!gamma_ok && (spec.gamma_kind || spec.gamma_exponent))
    throw ConfigError(label + " takes no discount-sequence parameter");
  if (!lambda_ok && spec.lambda) throw ConfigError(label + " takes no lambda parameter");
  if (!tau_ok && spec.tau) throw ConfigError(label + " takes no tau parameter");
  if (!w0_ok && spec.w0) throw ConfigError(label + " takes no w0 parameter");
  if (!b0_ok && spec.b0) throw ConfigError(label + " takes no b0 parameter");
}

inline GammaSeq resolve_gamma(const AlgorithmSpec& spec, GammaKind fallback, int n_bound) {
  const GammaKind kind = spec.gamma_kind.value_or(fallback);
  if (spec.gamma_exponent && kind != GammaKind::kPowerLaw)
    throw ConfigError("discount exponent only applies to the power-law sequence");
  const double exponent = spec.gamma_exponent.value_or(1.6);
  return make_gamma(kind, n_bound, exponent);
}

}  // namespace detail

// Instantiates the procedure named by the spec with defaults filled in.
// The plain step-up comparator (kind == kBh) is not an online procedure and
// is handled by apply_algorithm directly; asking for it here is an error.
inline std::unique_ptr<Procedure> make_procedure(const AlgorithmSpec& spec, double alpha,
                                                 int n_bound) {
  using detail::reject_override;
  using detail::resolve_gamma;
  switch (spec.kind) {
    case AlgorithmKind::kUncorrected:
      reject_override(spec, false, false, false, false, false);
      return std::make_unique<FixedLevel>(FixedLevel::uncorrected_rule(alpha, n_bound));
    case AlgorithmKind::kBonferroni:
      reject_override(spec, false, false, false, false, false);
      return std::make_unique<FixedLevel>(FixedLevel::bonferroni(alpha, n_bound));
    case AlgorithmKind::kBh:
      throw ConfigError("the offline step-up comparator has no online procedure form");
    case AlgorithmKind::kLond:
      reject_override(spec, true, false, false, false, false);
      return std::make_unique<Lond>(alpha, n_bound,
                                    resolve_gamma(spec, GammaKind::kConstant, n_bound));
    case AlgorithmKind::kLord: {
      reject_override(spec, true, false, false, true, true);
      const double w0 = spec.w0.value_or(alpha / 10.0);
      const double b0 = spec.b0.value_or(alpha - w0);
      return std::make_unique<Lord>(alpha, n_bound,
                                    resolve_gamma(spec, GammaKind::kLordLog, n_bound), w0, b0);
    }
    case AlgorithmKind::kSaffron: {
      reject_override(spec, true, true, false, true, false);
      const double lambda = spec.lambda.value_or(0.5);
      const double w0 = spec.w0.value_or(alpha / 2.0);
      return std::make_unique<Saffron>(
          alpha, n_bound, resolve_gamma(spec, GammaKind::kPowerLaw, n_bound), lambda, w0);
    }
    case AlgorithmKind::kAddis: {
      reject_override(spec, true, true, true, true, false);
      const double lambda = spec.lambda.value_or(0.5);
      const double tau = spec.tau.value_or(0.5);
      const double w0 = spec.w0.value_or(lambda * tau * alpha / 2.0);
      return std::make_unique<Addis>(alpha, n_bound,
                                     resolve_gamma(spec, GammaKind::kPowerLaw, n_bound),
                                     lambda, tau, w0);
    }
    case AlgorithmKind::kAddisSpending: {
      reject_override(spec, true, true, true, false, false);
      const double lambda = spec.lambda.value_or(0.25);
      const double tau = spec.tau.value_or(0.5);
      return std::make_unique<AddisSpending>(
          alpha, n_bound, resolve_gamma(spec, GammaKind::kPowerLaw, n_bound), lambda, tau);
    }
    case AlgorithmKind::kBatchBh:
      reject_override(spec, true, false, false, false, false);
      return std::make_unique<BatchBH>(alpha, n_bound,
                                       resolve_gamma(spec, GammaKind::kPowerLaw, n_bound));
    case AlgorithmKind::kBatchPrds:
      reject_override(spec, true, false, false, false, false);
      return std::make_unique<BatchPRDS>(alpha, n_bound,
                                         resolve_gamma(spec, GammaKind::kPowerLaw, n_bound));
    case AlgorithmKind::kBatchStBh: {
      reject_override(spec, true, true, false, false, false);
      const double lambda = spec.lambda.value_or(0.5);
      return std::make_unique<BatchStBH>(
          alpha, n_bound, resolve_gamma(spec, GammaKind::kPowerLaw, n_bound), lambda);
    }
  }
  throw DomainError("unknown algorithm kind");
}

// Applies one algorithm to a realized trial and returns a rejection flag per
// test, aligned with realization.tests.  The offline comparator sees all
// p-values at once; batch rules consume the completion-time batches; the
// sequential rules consume tests one at a time in completion order.
inline std::vector<char> apply_algorithm(const AlgorithmSpec& spec,
                                         const TrialRealization& realization, double alpha,
                                         int n_bound) {
  const std::size_t total = realization.tests.size();
  std::vector<double> p_values(total);
  for (std::size_t i = 0; i < total; ++i) p_values[i] = realization.tests[i].p;

  std::vector<char> rejected(total, 0);
  if (spec.kind == AlgorithmKind::kBh) {
    detail::reject_override(spec, false, false, false, false, false);
    for (int index : bh_procedure(p_values, alpha)) rejected[static_cast<std::size_t>(index)] = 1;
    return rejected;
  }

  const std::unique_ptr<Procedure> procedure = make_procedure(spec, alpha, n_bound);
  if (procedure->batch_oriented()) {
    std::size_t offset = 0;
    for (int size : realization.batch_sizes) {
      const std::span<const double> batch(p_values.data() + offset,
                                          static_cast<std::size_t>(size));
      const std::vector<TestDecision> decisions = procedure->test_batch(batch);
      for (int i = 0; i < size; ++i)
        rejected[offset + static_cast<std::size_t>(i)] =
            decisions[static_cast<std::size_t>(i)].rejected ? 1 : 0;
      offset += static_cast<std::size_t>(size);
    }
  } else {
    for (std::size_t i = 0; i < total; ++i)
      rejected[i] = procedure->test_one(p_values[i]).rejected ? 1 : 0;
  }
  return rejected;
}

// --- Replication scoring ----------------------------------------------------

struct ReplicationOutcome {
  int false_rejections = 0;  // V
  int rejections = 0;        // R
  int true_rejections = 0;   // S = R - V
  int nonnull_count = 0;     // m1, truly effective arms in the realization
};

inline ReplicationOutcome score_replication(const TrialRealization& realization,
                                            const std::vector<char>& rejected) {
  if (rejected.size() != realization.tests.size())
    throw DomainError("rejection flags must align with the realized tests");
  ReplicationOutcome outcome;
  for (std::size_t i = 0; i < rejected.size(); ++i) {
    const bool is_null = realization.tests[i].is_null;
    if (!is_null) ++outcome.nonnull_count;
    if (rejected[i]) {
      ++outcome.rejections;
      if (is_null) ++outcome.false_rejections;
      else ++outcome.true_rejections;
    }
  }
  return outcome;
}

// Monte Carlo standard error of a sample mean: sd / sqrt(B), computed in a
// fixed order so results are reproducible bit for bit.
inline double mc_standard_error(std::span<const double> values, double mean) {
  const std::size_t reps = values.size();
  if (reps < 2) throw DomainError("standard error needs at least two replications");
  double sum_sq = 0.0;
  for (double value : values) {
    const double d = value - mean;
    sum_sq += d * d;
  }
  return std::sqrt(sum_sq / (static_cast<double>(reps) * static_cast<double>(reps - 1)));
}

inline double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double value : values) sum += value;
  return sum / static_cast<double>(values.size());
}

struct MetricEstimate {
  double estimate = 0.0;
  double mc_se = 0.0;
};

// Summary of one (scenario, algorithm) cell across all replications.
struct StudyCell {
  std::string algorithm;
  MetricEstimate fdr;
  MetricEstimate fwer;
  std::optional<MetricEstimate> sensitivity;        // absent under the global null
  std::optional<MetricEstimate> disjunctive_power;  // absent under the global null
  int reps = 0;
};

struct ScenarioResult {
  ScenarioSpec spec;
  std::vector<StudyCell> cells;  // applicable algorithms, input order
};

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hardware = std::thread::hardware_concurrency();
  return hardware == 0 ? 1 : static_cast<int>(hardware);
}

// Runs every applicable algorithm over `reps` Monte Carlo replications of one
// scenario.  Each replication derives its own seed from (base_seed,
// scenario_id, rep); within a replication the draw order is fixed (treatment
// placement, then control outcomes, then arm outcomes) and all algorithms
// share the realization.  Replications are scored into preallocated slots and
// reduced sequentially, so the result is identical for any thread count.
inline ScenarioResult run_scenario(const ScenarioSpec& spec,
                                   const std::vector<AlgorithmSpec>& algorithms, int reps,
                                   std::uint64_t base_seed, int threads) {
  if (reps < 2) throw ConfigError("need at least two replications");
  const AccrualSchedule schedule = build_schedule(spec.trial);

  std::vector<AlgorithmSpec> roster;
  for (const AlgorithmSpec& algorithm : algorithms) {
    if (algorithm_applies(algorithm.kind, spec.entry_kind)) roster.push_back(algorithm);
  }

  // Validate parameters once, up front, rather than per replication.
  for (const AlgorithmSpec& algorithm : roster) {
    if (algorithm.kind == AlgorithmKind::kBh)
      detail::reject_override(algorithm, false, false, false, false, false);
    else
      (void)make_procedure(algorithm, spec.trial.alpha, spec.trial.n_bound);
  }

  const std::size_t n_algorithms = roster.size();
  const std::size_t n_reps = static_cast<std::size_t>(reps);
  const int expected_m1 =
      deterministic_nonnull_count(spec.mean_kind, spec.trial.k_arms, spec.m_effective);

  // Per-algorithm, per-replication metric values.
  std::vector<std::vector<double>> fdp(n_algorithms, std::vector<double>(n_reps, 0.0));
  std::vector<std::vector<double>> fwe(n_algorithms, std::vector<double>(n_reps, 0.0));
  std::vector<std::vector<double>> sens(n_algorithms, std::vector<double>(n_reps, 0.0));
  std::vector<std::vector<double>> disj(n_algorithms, std::vector<double>(n_reps, 0.0));

  const auto run_range = [&](std::size_t begin, std::size_t end) {
    TrialConfig config = spec.trial;
    for (std::size_t rep = begin; rep < end; ++rep) {
      RandomStream rng(
          derive_seed(base_seed, spec.scenario_id, static_cast<std::uint64_t>(rep)));
      const std::vector<double> effects =
          materialize_means(spec.mean_kind, config.k_arms, spec.m_effective, rng);
      for (int arm = 1; arm <= config.k_arms; ++arm)
        config.mu[static_cast<std::size_t>(arm)] =
            spec.trial.mu[0] + effects[static_cast<std::size_t>(arm - 1)];
      const TrialRealization realization = simulate_trial(config, schedule, rng);

      for (std::size_t a = 0; a < n_algorithms; ++a) {
        const std::vector<char> rejected =
            apply_algorithm(roster[a], realization, config.alpha, config.n_bound);
        const ReplicationOutcome outcome = score_replication(realization, rejected);
        if (outcome.nonnull_count != expected_m1)
          throw DomainError("realized effective-arm count disagrees with the scenario");
        fdp[a][rep] = static_cast<double>(outcome.false_rejections) /
                      static_cast<double>(std::max(outcome.rejections, 1));
        fwe[a][rep] = outcome.false_rejections >= 1 ? 1.0 : 0.0;
        if (expected_m1 > 0) {
          sens[a][rep] = static_cast<double>(outcome.true_rejections) /
                         static_cast<double>(outcome.nonnull_count);
          disj[a][rep] = outcome.true_rejections >= 1 ? 1.0 : 0.0;
        }
      }
    }
  };

  const int worker_count = std::min<int>(resolve_threads(threads), reps);
  if (worker_count <= 1) {
    run_range(0, n_reps);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(worker_count));
    workers.reserve(static_cast<std::size_t>(worker_count));
    const std::size_t chunk = (n_reps + static_cast<std::size_t>(worker_count) - 1) /
                              static_cast<std::size_t>(worker_count);
    for (int t = 0; t < worker_count; ++t) {
      const std::size_t begin = static_cast<std::size_t>(t) * chunk;
      const std::size_t end = std::min(n_reps, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back([&run_range, &failures, t, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          failures[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
    for (const std::exception_ptr& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }
  }

  ScenarioResult result;
  result.spec = spec;
  result.cells.reserve(n_algorithms);
  for (std::size_t a = 0; a < n_algorithms; ++a) {
    StudyCell cell;
    cell.algorithm = algorithm_label(roster[a].kind);
    cell.reps = reps;
    cell.fdr.estimate = mean_of(fdp[a]);
    cell.fdr.mc_se = mc_standard_error(fdp[a], cell.fdr.estimate);
    cell.fwer.estimate = mean_of(fwe[a]);
    cell.fwer.mc_se = mc_standard_error(fwe[a], cell.fwer.estimate);
    if (expected_m1 > 0) {
      MetricEstimate sensitivity;
      sensitivity.estimate = mean_of(sens[a]);
      sensitivity.mc_se = mc_standard_error(sens[a], sensitivity.estimate);
      cell.sensitivity = sensitivity;
      MetricEstimate disjunctive;
      disjunctive.estimate = mean_of(disj[a]);
      disjunctive.mc_se = mc_standard_error(disj[a], disjunctive.estimate);
      cell.disjunctive_power = disjunctive;
    }
    result.cells.push_back(std::move(cell));
  }
  return result;
}

}  // namespace onlinetrial
