#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "onlinetrial/errors.hpp"
#include "onlinetrial/normal.hpp"
#include "onlinetrial/rng.hpp"

namespace onlinetrial {

// An idealised platform trial: K experimental arms against one shared
// control, deterministic accrual of n/r patients per active arm per unit
// time, Gaussian outcomes with known sigma, one-sided comparisons against
// concurrent controls only.
struct TrialConfig {
  int k_arms = 0;
  int n_per_arm = 0;         // patients per experimental arm (and per arm window)
  int duration = 0;          // r: time an arm stays active
  double sigma = 1.0;
  std::vector<double> mu;    // size k_arms + 1; mu[0] is the control mean
  std::vector<int> entry_times;  // size k_arms, unit-time steps, non-decreasing
  double alpha = 0.025;
  int n_bound = 0;           // pre-specified horizon on hypothesis count
};

inline void validate_config(const TrialConfig& config) {
  if (config.k_arms < 1) throw ConfigError("trial needs at least one experimental arm");
  if (config.n_per_arm < 1) throw ConfigError("patients per arm must be positive");
  if (config.duration < 1) throw ConfigError("arm duration must be positive");
  if (config.n_per_arm % config.duration != 0)
    throw ConfigError("patients per arm must be divisible by the duration (integer accrual rate)");
  if (!(config.sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (static_cast<int>(config.mu.size()) != config.k_arms + 1)
    throw ConfigError("means vector must have one entry per arm plus the control");
  if (static_cast<int>(config.entry_times.size()) != config.k_arms)
    throw ConfigError("entry-time vector must have one entry per arm");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");
  if (config.n_bound < config.k_arms)
    throw ConfigError("hypothesis horizon must be at least the number of arms");
  if (config.entry_times.front() != 0)
    throw ConfigError("the first arm must enter at time zero");
  for (int i = 0; i < config.k_arms; ++i) {
    if (config.entry_times[static_cast<std::size_t>(i)] < 0)
      throw ConfigError("entry times must be non-negative");
    if (i > 0) {
      const int prev = config.entry_times[static_cast<std::size_t>(i - 1)];
      const int curr = config.entry_times[static_cast<std::size_t>(i)];
      if (curr < prev) throw ConfigError("entry times must be non-decreasing");
      if (curr > prev + config.duration)
        throw ConfigError("entry times must not leave a gap with no active arm");
    }
  }
}

// Deterministic accrual bookkeeping.  Control patients are indexed by accrual
// slot: slot u (one unit of time) contributes n/r patients, stored
// contiguously, so the concurrent controls of arm i are exactly the index
// range [t_i * n/r, (t_i + r) * n/r).
struct AccrualSchedule {
  int per_slot = 0;     // n / r patients per active arm per unit time
  int total_slots = 0;  // t_K + r
  long control_total = 0;
  std::vector<std::pair<long, long>> control_ranges;  // per arm, [begin, end)
};

inline AccrualSchedule build_schedule(const TrialConfig& config) {
  validate_config(config);
  AccrualSchedule schedule;
  schedule.per_slot = config.n_per_arm / config.duration;
  schedule.total_slots = config.entry_times.back() + config.duration;
  schedule.control_total =
      static_cast<long>(schedule.per_slot) * static_cast<long>(schedule.total_slots);
  schedule.control_ranges.reserve(static_cast<std::size_t>(config.k_arms));
  for (int i = 0; i < config.k_arms; ++i) {
    const long begin = static_cast<long>(config.entry_times[static_cast<std::size_t>(i)]) *
                       schedule.per_slot;
    const long end = begin + static_cast<long>(config.n_per_arm);
    schedule.control_ranges.emplace_back(begin, end);
  }
  return schedule;
}

struct ArmOutcome {
  int arm = 0;              // 1-based arm index
  int completion_time = 0;  // entry time + duration
  double z = 0.0;
  double p = 1.0;
  bool is_null = true;      // treatment effect mu_i - mu_0 <= 0
};

struct TrialRealization {
  std::vector<ArmOutcome> tests;  // sorted by (completion time, arm index)
  std::vector<int> batch_sizes;   // runs of equal completion time, in test order
};

// One Monte Carlo realization.  Control outcomes are drawn once and shared
// across arms (the source of positive dependence between z-statistics); each
// arm is compared against the mean of its concurrent controls.  Draw order is
// fixed — all control outcomes first, then each arm in index order — so a
// seeded stream reproduces the realization bit for bit.
inline TrialRealization simulate_trial(const TrialConfig& config,
                                       const AccrualSchedule& schedule,
                                       RandomStream& rng) {
  const double mu0 = config.mu[0];

  // Prefix sums of control outcomes give O(1) concurrent-control means.
  std::vector<double> control_prefix(static_cast<std::size_t>(schedule.control_total) + 1, 0.0);
  for (long j = 0; j < schedule.control_total; ++j) {
    const double outcome = mu0 + config.sigma * rng.normal();
    control_prefix[static_cast<std::size_t>(j) + 1] =
        control_prefix[static_cast<std::size_t>(j)] + outcome;
  }

  TrialRealization realization;
  realization.tests.reserve(static_cast<std::size_t>(config.k_arms));
  for (int i = 1; i <= config.k_arms; ++i) {
    double sum = 0.0;
    for (int j = 0; j < config.n_per_arm; ++j) {
      sum += config.mu[static_cast<std::size_t>(i)] + config.sigma * rng.normal();
    }
    const double xbar = sum / static_cast<double>(config.n_per_arm);

    const auto [begin, end] = schedule.control_ranges[static_cast<std::size_t>(i - 1)];
    const long n0 = end - begin;
    const double control_mean = (control_prefix[static_cast<std::size_t>(end)] -
                                 control_prefix[static_cast<std::size_t>(begin)]) /
                                static_cast<double>(n0);

    ArmOutcome outcome;
    outcome.arm = i;
    outcome.completion_time =
        config.entry_times[static_cast<std::size_t>(i - 1)] + config.duration;
    outcome.z = z_statistic(xbar, control_mean, config.sigma, config.n_per_arm, n0);
    outcome.p = normal_upper_tail(outcome.z);
    outcome.is_null = (config.mu[static_cast<std::size_t>(i)] - mu0) <= 0.0;
    realization.tests.push_back(outcome);
  }

  std::sort(realization.tests.begin(), realization.tests.end(),
            [](const ArmOutcome& a, const ArmOutcome& b) {
              if (a.completion_time != b.completion_time)
                return a.completion_time < b.completion_time;
              return a.arm < b.arm;
            });

  int previous_completion = -1;
  for (const ArmOutcome& outcome : realization.tests) {
    if (!realization.batch_sizes.empty() && outcome.completion_time == previous_completion) {
      ++realization.batch_sizes.back();
    } else {
      realization.batch_sizes.push_back(1);
    }
    previous_completion = outcome.completion_time;
  }
  return realization;
}

}  // namespace onlinetrial
