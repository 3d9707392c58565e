#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "onlinetrial/errors.hpp"
#include "onlinetrial/rng.hpp"
#include "onlinetrial/trial.hpp"

namespace onlinetrial {

// Treatment-mean scenarios.  The materialized values are treatment effects
// relative to the control mean; arm i is truly effective iff its effect is
// strictly positive.
enum class MeanKind {
  kGlobalNull,
  kFixedEarly,
  kFixedLate,
  kFixedRandom,
  kStairDec,
  kStairInc,
  kStairRandom,
};

// Arm entry-time patterns over a trial with per-arm duration r.
enum class EntryKind {
  kAllAtOnce,
  kBatch5,
  kStagger2,
  kStagger5,
  kFullySeq,
};

inline const char* mean_kind_label(MeanKind kind) {
  switch (kind) {
    case MeanKind::kGlobalNull: return "global_null";
    case MeanKind::kFixedEarly: return "fixed_early";
    case MeanKind::kFixedLate: return "fixed_late";
    case MeanKind::kFixedRandom: return "fixed_random";
    case MeanKind::kStairDec: return "stair_dec";
    case MeanKind::kStairInc: return "stair_inc";
    case MeanKind::kStairRandom: return "stair_random";
  }
  throw DomainError("unknown mean kind");
}

inline const char* entry_kind_label(EntryKind kind) {
  switch (kind) {
    case EntryKind::kAllAtOnce: return "all_at_once";
    case EntryKind::kBatch5: return "batch5";
    case EntryKind::kStagger2: return "stagger2";
    case EntryKind::kStagger5: return "stagger5";
    case EntryKind::kFullySeq: return "fully_seq";
  }
  throw DomainError("unknown entry kind");
}

inline MeanKind mean_kind_from_label(const std::string& label) {
  if (label == "global_null") return MeanKind::kGlobalNull;
  if (label == "fixed_early") return MeanKind::kFixedEarly;
  if (label == "fixed_late") return MeanKind::kFixedLate;
  if (label == "fixed_random") return MeanKind::kFixedRandom;
  if (label == "stair_dec") return MeanKind::kStairDec;
  if (label == "stair_inc") return MeanKind::kStairInc;
  if (label == "stair_random") return MeanKind::kStairRandom;
  throw ConfigError("unknown mean scenario: " + label);
}

inline EntryKind entry_kind_from_label(const std::string& label) {
  if (label == "all_at_once") return EntryKind::kAllAtOnce;
  if (label == "batch5") return EntryKind::kBatch5;
  if (label == "stagger2") return EntryKind::kStagger2;
  if (label == "stagger5") return EntryKind::kStagger5;
  if (label == "fully_seq") return EntryKind::kFullySeq;
  throw ConfigError("unknown entry pattern: " + label);
}

inline bool is_fixed_means(MeanKind kind) {
  return kind == MeanKind::kFixedEarly || kind == MeanKind::kFixedLate ||
         kind == MeanKind::kFixedRandom;
}

inline bool uses_rng(MeanKind kind) {
  return kind == MeanKind::kFixedRandom || kind == MeanKind::kStairRandom;
}

// --- Entry-time materialization -------------------------------------------

inline std::vector<int> entry_all_at_once(int k_arms) {
  return std::vector<int>(static_cast<std::size_t>(k_arms), 0);
}

// Arms enter in consecutive groups of b; group j starts when group j-1
// finishes, at time r*(j-1).
inline std::vector<int> entry_batches(int k_arms, int duration, int batch) {
  if (batch < 1) throw DomainError("batch size must be positive");
  if (k_arms % batch != 0)
    throw DomainError("batch size must divide the number of arms");
  std::vector<int> times(static_cast<std::size_t>(k_arms), 0);
  for (int i = 0; i < k_arms; ++i)
    times[static_cast<std::size_t>(i)] = duration * (i / batch);
  return times;
}

// Evenly staggered entries t_i = r*(i-1)/s; s arms are concurrently active.
inline std::vector<int> entry_staggered(int k_arms, int duration, int stagger) {
  if (stagger < 1) throw DomainError("stagger divisor must be positive");
  std::vector<int> times(static_cast<std::size_t>(k_arms), 0);
  for (int i = 0; i < k_arms; ++i) {
    const int numerator = duration * i;
    if (numerator % stagger != 0)
      throw DomainError("staggered entry times must be whole time units");
    times[static_cast<std::size_t>(i)] = numerator / stagger;
  }
  return times;
}

inline std::vector<int> entry_fully_sequential(int k_arms, int duration) {
  std::vector<int> times(static_cast<std::size_t>(k_arms), 0);
  for (int i = 0; i < k_arms; ++i)
    times[static_cast<std::size_t>(i)] = duration * i;
  return times;
}

inline std::vector<int> materialize_entry(EntryKind kind, int k_arms, int duration) {
  if (k_arms < 1) throw DomainError("need at least one arm");
  if (duration < 1) throw DomainError("duration must be positive");
  switch (kind) {
    case EntryKind::kAllAtOnce: return entry_all_at_once(k_arms);
    case EntryKind::kBatch5: return entry_batches(k_arms, duration, 5);
    case EntryKind::kStagger2: return entry_staggered(k_arms, duration, 2);
    case EntryKind::kStagger5: return entry_staggered(k_arms, duration, 5);
    case EntryKind::kFullySeq: return entry_fully_sequential(k_arms, duration);
  }
  throw DomainError("unknown entry kind");
}

// --- Treatment-effect materialization -------------------------------------

// Returns the K treatment effects for one replication.  Random variants
// (fixed_random placements, stair_random orderings) consume the stream, so
// they are redrawn each replication; deterministic variants leave the stream
// untouched.
inline std::vector<double> materialize_means(MeanKind kind, int k_arms, int m_effective,
                                             RandomStream& rng) {
  if (k_arms < 1) throw DomainError("need at least one arm");
  if (is_fixed_means(kind)) {
    if (m_effective < 1) throw DomainError("fixed-means scenarios need at least one effective arm");
    if (m_effective > k_arms)
      throw DomainError("cannot place more effective arms than arms");
  }
  std::vector<double> mu(static_cast<std::size_t>(k_arms), 0.0);
  constexpr double kFixedEffect = 0.5;
  const int half_up = (k_arms + 1) / 2;  // ceil(K/2)
  switch (kind) {
    case MeanKind::kGlobalNull:
      break;
    case MeanKind::kFixedEarly:
      for (int i = 0; i < m_effective; ++i) mu[static_cast<std::size_t>(i)] = kFixedEffect;
      break;
    case MeanKind::kFixedLate:
      for (int i = k_arms - m_effective; i < k_arms; ++i)
        mu[static_cast<std::size_t>(i)] = kFixedEffect;
      break;
    case MeanKind::kFixedRandom: {
      const std::vector<int> picks = rng.sample_without_replacement(k_arms, m_effective);
      for (int pick : picks) mu[static_cast<std::size_t>(pick)] = kFixedEffect;
      break;
    }
    case MeanKind::kStairDec:
      for (int i = 1; i <= k_arms; ++i)
        mu[static_cast<std::size_t>(i - 1)] =
            static_cast<double>(i - half_up) / static_cast<double>(k_arms);
      break;
    case MeanKind::kStairInc:
      for (int i = 1; i <= k_arms; ++i)
        mu[static_cast<std::size_t>(i - 1)] =
            static_cast<double>(half_up - i + 1) / static_cast<double>(k_arms);
      break;
    case MeanKind::kStairRandom: {
      for (int i = 1; i <= k_arms; ++i)
        mu[static_cast<std::size_t>(i - 1)] =
            static_cast<double>(i - half_up) / static_cast<double>(k_arms);
      rng.shuffle(mu);
      break;
    }
  }
  return mu;
}

// Number of truly effective arms (effect > 0), which every pattern fixes in
// advance even when placements are random.
inline int deterministic_nonnull_count(MeanKind kind, int k_arms, int m_effective) {
  switch (kind) {
    case MeanKind::kGlobalNull: return 0;
    case MeanKind::kFixedEarly:
    case MeanKind::kFixedLate:
    case MeanKind::kFixedRandom: return m_effective;
    case MeanKind::kStairDec:
    case MeanKind::kStairRandom:
      return k_arms / 2;  // entries (i - ceil(K/2))/K > 0
    case MeanKind::kStairInc:
      return (k_arms + 1) / 2;  // entries (ceil(K/2) - i + 1)/K > 0
  }
  throw DomainError("unknown mean kind");
}

// --- Grid enumeration ------------------------------------------------------

struct ScenarioSpec {
  std::string scenario_id;
  MeanKind mean_kind = MeanKind::kGlobalNull;
  EntryKind entry_kind = EntryKind::kFullySeq;
  int m_effective = 0;  // fixed-means parameter; 0 for other patterns
  TrialConfig trial;    // mu holds the control mean everywhere; arm effects
                        // are applied per replication
};

struct StudyGrid {
  std::vector<int> k_values;
  std::vector<int> n_bound_multipliers;
  std::vector<MeanKind> mean_kinds;
  std::vector<EntryKind> entry_kinds;
  std::vector<int> m_values;  // empty -> per-K defaults {1, K/5+1, 2K/5+1}
};

struct TrialConstants {
  int n_per_arm = 50;
  int duration = 10;
  double sigma = 1.0;
  double alpha = 0.025;
  double mu0 = 0.0;
};

inline std::vector<int> default_m_values(int k_arms) {
  if (k_arms % 5 != 0)
    throw ConfigError("default effective-arm counts need the number of arms divisible by 5");
  return {1, k_arms / 5 + 1, 2 * k_arms / 5 + 1};
}

inline std::string format_scenario_id(int k_arms, int n_bound, MeanKind mean_kind,
                                      int m_effective, EntryKind entry_kind) {
  char buffer[96];
  std::snprintf(buffer, sizeof(buffer), "K%02d-N%03d-%s-m%02d-%s", k_arms, n_bound,
                mean_kind_label(mean_kind), m_effective, entry_kind_label(entry_kind));
  return std::string(buffer);
}

// Cartesian product of the grid axes in declaration order.  The m axis only
// applies to fixed-means patterns; other patterns contribute one scenario
// with m recorded as 0.
inline std::vector<ScenarioSpec> enumerate_grid(const StudyGrid& grid,
                                                const TrialConstants& constants) {
  if (grid.k_values.empty() || grid.n_bound_multipliers.empty() ||
      grid.mean_kinds.empty() || grid.entry_kinds.empty())
    throw ConfigError("study grid has an empty axis");
  std::vector<ScenarioSpec> scenarios;
  for (int k_arms : grid.k_values) {
    const std::vector<int> m_values =
        grid.m_values.empty() ? default_m_values(k_arms) : grid.m_values;
    for (int multiplier : grid.n_bound_multipliers) {
      if (multiplier < 1) throw ConfigError("horizon multipliers must be positive");
      const int n_bound = multiplier * k_arms;
      for (MeanKind mean_kind : grid.mean_kinds) {
        const std::vector<int> scenario_ms =
            is_fixed_means(mean_kind) ? m_values : std::vector<int>{0};
        for (int m_effective : scenario_ms) {
          if (is_fixed_means(mean_kind) && m_effective > k_arms)
            throw ConfigError("more effective arms than arms in grid");
          for (EntryKind entry_kind : grid.entry_kinds) {
            ScenarioSpec spec;
            spec.mean_kind = mean_kind;
            spec.entry_kind = entry_kind;
            spec.m_effective = m_effective;
            spec.trial.k_arms = k_arms;
            spec.trial.n_per_arm = constants.n_per_arm;
            spec.trial.duration = constants.duration;
            spec.trial.sigma = constants.sigma;
            spec.trial.alpha = constants.alpha;
            spec.trial.n_bound = n_bound;
            spec.trial.mu.assign(static_cast<std::size_t>(k_arms) + 1, constants.mu0);
            spec.trial.entry_times =
                materialize_entry(entry_kind, k_arms, constants.duration);
            spec.scenario_id =
                format_scenario_id(k_arms, n_bound, mean_kind, m_effective, entry_kind);
            scenarios.push_back(std::move(spec));
          }
        }
      }
    }
  }
  return scenarios;
}

}  // namespace onlinetrial
