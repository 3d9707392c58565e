#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "onlinetrial/rng.hpp"
#include "onlinetrial/scenario.hpp"

using onlinetrial::ConfigError;
using onlinetrial::default_m_values;
using onlinetrial::deterministic_nonnull_count;
using onlinetrial::DomainError;
using onlinetrial::entry_kind_from_label;
using onlinetrial::entry_kind_label;
using onlinetrial::EntryKind;
using onlinetrial::enumerate_grid;
using onlinetrial::format_scenario_id;
using onlinetrial::is_fixed_means;
using onlinetrial::materialize_entry;
using onlinetrial::materialize_means;
using onlinetrial::mean_kind_from_label;
using onlinetrial::mean_kind_label;
using onlinetrial::MeanKind;
using onlinetrial::RandomStream;
using onlinetrial::ScenarioSpec;
using onlinetrial::StudyGrid;
using onlinetrial::TrialConstants;
using onlinetrial::uses_rng;

TEST_CASE("entry patterns materialize the documented times", "[scenario]") {
  REQUIRE(materialize_entry(EntryKind::kAllAtOnce, 4, 10) ==
          std::vector<int>{0, 0, 0, 0});
  REQUIRE(materialize_entry(EntryKind::kBatch5, 10, 10) ==
          std::vector<int>{0, 0, 0, 0, 0, 10, 10, 10, 10, 10});
  REQUIRE(materialize_entry(EntryKind::kStagger2, 4, 10) ==
          std::vector<int>{0, 5, 10, 15});
  REQUIRE(materialize_entry(EntryKind::kStagger5, 3, 10) == std::vector<int>{0, 2, 4});
  REQUIRE(materialize_entry(EntryKind::kFullySeq, 3, 10) == std::vector<int>{0, 10, 20});
}

TEST_CASE("entry patterns reject impossible requests", "[scenario]") {
  // Five-arm waves need the arm count divisible by five.
  REQUIRE_THROWS_AS(materialize_entry(EntryKind::kBatch5, 7, 10), DomainError);
  // Staggered times must land on whole time units.
  REQUIRE_THROWS_AS(materialize_entry(EntryKind::kStagger5, 3, 7), DomainError);
  REQUIRE_THROWS_AS(materialize_entry(EntryKind::kStagger2, 2, 5), DomainError);
  REQUIRE_THROWS_AS(materialize_entry(EntryKind::kAllAtOnce, 0, 10), DomainError);
  REQUIRE_THROWS_AS(materialize_entry(EntryKind::kAllAtOnce, 3, 0), DomainError);
}

TEST_CASE("fixed-effect placements", "[scenario]") {
  RandomStream rng(1);
  REQUIRE(materialize_means(MeanKind::kGlobalNull, 5, 0, rng) ==
          std::vector<double>{0.0, 0.0, 0.0, 0.0, 0.0});
  REQUIRE(materialize_means(MeanKind::kFixedEarly, 5, 2, rng) ==
          std::vector<double>{0.5, 0.5, 0.0, 0.0, 0.0});
  REQUIRE(materialize_means(MeanKind::kFixedLate, 5, 2, rng) ==
          std::vector<double>{0.0, 0.0, 0.0, 0.5, 0.5});
}

TEST_CASE("staircase effects for five arms", "[scenario]") {
  RandomStream rng(2);
  const std::vector<double> dec = materialize_means(MeanKind::kStairDec, 5, 0, rng);
  const std::vector<double> expected_dec = {-0.4, -0.2, 0.0, 0.2, 0.4};
  REQUIRE(dec.size() == expected_dec.size());
  for (std::size_t i = 0; i < dec.size(); ++i)
    REQUIRE_THAT(dec[i], Catch::Matchers::WithinAbs(expected_dec[i], 1e-12));

  const std::vector<double> inc = materialize_means(MeanKind::kStairInc, 5, 0, rng);
  const std::vector<double> expected_inc = {0.6, 0.4, 0.2, 0.0, -0.2};
  for (std::size_t i = 0; i < inc.size(); ++i)
    REQUIRE_THAT(inc[i], Catch::Matchers::WithinAbs(expected_inc[i], 1e-12));
}

TEST_CASE("random placement reshuffles but keeps the effect profile", "[scenario]") {
  RandomStream rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> random_fixed =
        materialize_means(MeanKind::kFixedRandom, 6, 2, rng);
    int effective = 0;
    for (double v : random_fixed) {
      REQUIRE((v == 0.0 || v == 0.5));
      if (v == 0.5) ++effective;
    }
    REQUIRE(effective == 2);

    std::vector<double> random_stairs =
        materialize_means(MeanKind::kStairRandom, 5, 0, rng);
    std::vector<double> reference = materialize_means(MeanKind::kStairDec, 5, 0, rng);
    std::sort(random_stairs.begin(), random_stairs.end());
    std::sort(reference.begin(), reference.end());
    REQUIRE(random_stairs == reference);
  }
}

TEST_CASE("random placement selects every arm uniformly", "[scenario]") {
  RandomStream rng(20240614);
  const int draws = 100000;
  const int k = 5;
  std::vector<int> hits(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < draws; ++i) {
    const std::vector<double> mu = materialize_means(MeanKind::kFixedRandom, k, 1, rng);
    for (int arm = 0; arm < k; ++arm) {
      if (mu[static_cast<std::size_t>(arm)] > 0.0) ++hits[static_cast<std::size_t>(arm)];
    }
  }
  const double p = 1.0 / k;
  const double band = 3.0 * std::sqrt(p * (1.0 - p) * draws);
  for (int count : hits) {
    REQUIRE(static_cast<double>(count) > draws * p - band);
    REQUIRE(static_cast<double>(count) < draws * p + band);
  }
}

TEST_CASE("deterministic variants leave the stream untouched", "[scenario]") {
  RandomStream probe_a(555);
  RandomStream probe_b(555);
  (void)materialize_means(MeanKind::kFixedEarly, 5, 2, probe_a);
  (void)materialize_means(MeanKind::kStairDec, 5, 0, probe_a);
  // Both streams must now be in the same state.
  REQUIRE(probe_a.uniform01() == probe_b.uniform01());

  REQUIRE_FALSE(uses_rng(MeanKind::kFixedEarly));
  REQUIRE_FALSE(uses_rng(MeanKind::kStairInc));
  REQUIRE(uses_rng(MeanKind::kFixedRandom));
  REQUIRE(uses_rng(MeanKind::kStairRandom));
}

TEST_CASE("effective-arm counts are fixed per pattern", "[scenario]") {
  REQUIRE(deterministic_nonnull_count(MeanKind::kGlobalNull, 10, 0) == 0);
  REQUIRE(deterministic_nonnull_count(MeanKind::kFixedEarly, 10, 3) == 3);
  REQUIRE(deterministic_nonnull_count(MeanKind::kFixedLate, 10, 3) == 3);
  REQUIRE(deterministic_nonnull_count(MeanKind::kFixedRandom, 10, 3) == 3);
  REQUIRE(deterministic_nonnull_count(MeanKind::kStairDec, 5, 0) == 2);
  REQUIRE(deterministic_nonnull_count(MeanKind::kStairInc, 5, 0) == 3);
  REQUIRE(deterministic_nonnull_count(MeanKind::kStairRandom, 5, 0) == 2);
  REQUIRE(deterministic_nonnull_count(MeanKind::kStairDec, 10, 0) == 5);
  REQUIRE(deterministic_nonnull_count(MeanKind::kStairInc, 10, 0) == 5);
}

TEST_CASE("placement bounds are enforced", "[scenario]") {
  RandomStream rng(4);
  REQUIRE_THROWS_AS(materialize_means(MeanKind::kFixedEarly, 5, 6, rng), DomainError);
  REQUIRE_THROWS_AS(materialize_means(MeanKind::kFixedEarly, 5, 0, rng), DomainError);
  REQUIRE_THROWS_AS(materialize_means(MeanKind::kFixedRandom, 5, 6, rng), DomainError);
  REQUIRE_THROWS_AS(materialize_means(MeanKind::kGlobalNull, 0, 0, rng), DomainError);
}

TEST_CASE("labels round-trip", "[scenario]") {
  for (MeanKind kind :
       {MeanKind::kGlobalNull, MeanKind::kFixedEarly, MeanKind::kFixedLate,
        MeanKind::kFixedRandom, MeanKind::kStairDec, MeanKind::kStairInc,
        MeanKind::kStairRandom}) {
    REQUIRE(mean_kind_from_label(mean_kind_label(kind)) == kind);
  }
  for (EntryKind kind : {EntryKind::kAllAtOnce, EntryKind::kBatch5, EntryKind::kStagger2,
                         EntryKind::kStagger5, EntryKind::kFullySeq}) {
    REQUIRE(entry_kind_from_label(entry_kind_label(kind)) == kind);
  }
  REQUIRE_THROWS_AS(mean_kind_from_label("nope"), ConfigError);
  REQUIRE_THROWS_AS(entry_kind_from_label("nope"), ConfigError);
}

TEST_CASE("default effective-arm counts scale with the arm count", "[scenario]") {
  REQUIRE(default_m_values(5) == std::vector<int>{1, 2, 3});
  REQUIRE(default_m_values(10) == std::vector<int>{1, 3, 5});
  REQUIRE(default_m_values(20) == std::vector<int>{1, 5, 9});
  REQUIRE_THROWS_AS(default_m_values(7), ConfigError);
}

TEST_CASE("scenario identifiers are fixed-width and descriptive", "[scenario]") {
  REQUIRE(format_scenario_id(5, 10, MeanKind::kFixedEarly, 2, EntryKind::kFullySeq) ==
          "K05-N010-fixed_early-m02-fully_seq");
  REQUIRE(format_scenario_id(20, 100, MeanKind::kGlobalNull, 0, EntryKind::kAllAtOnce) ==
          "K20-N100-global_null-m00-all_at_once");
}

TEST_CASE("grid enumeration produces one scenario per combination", "[scenario]") {
  StudyGrid grid;
  grid.k_values = {5};
  grid.n_bound_multipliers = {1, 2};
  grid.mean_kinds = {MeanKind::kGlobalNull, MeanKind::kFixedEarly};
  grid.entry_kinds = {EntryKind::kAllAtOnce, EntryKind::kFullySeq};
  grid.m_values = {1, 2};
  const TrialConstants constants;

  const std::vector<ScenarioSpec> scenarios = enumerate_grid(grid, constants);
  // Per multiplier: the null pattern ignores m (2 entries), the fixed pattern
  // spans m in {1,2} (4 combinations): 6 scenarios; two multipliers: 12.
  REQUIRE(scenarios.size() == 12);

  std::set<std::string> ids;
  for (const ScenarioSpec& spec : scenarios) {
    ids.insert(spec.scenario_id);
    REQUIRE(spec.trial.k_arms == 5);
    REQUIRE(spec.trial.n_per_arm == constants.n_per_arm);
    REQUIRE(spec.trial.alpha == constants.alpha);
    REQUIRE(spec.trial.mu.size() == 6);
    REQUIRE(spec.trial.entry_times ==
            materialize_entry(spec.entry_kind, 5, constants.duration));
    if (!is_fixed_means(spec.mean_kind)) REQUIRE(spec.m_effective == 0);
    REQUIRE((spec.trial.n_bound == 5 || spec.trial.n_bound == 10));
  }
  REQUIRE(ids.size() == scenarios.size());
}

TEST_CASE("grid enumeration applies per-arm-count defaults", "[scenario]") {
  StudyGrid grid;
  grid.k_values = {10};
  grid.n_bound_multipliers = {1};
  grid.mean_kinds = {MeanKind::kFixedLate};
  grid.entry_kinds = {EntryKind::kFullySeq};
  const std::vector<ScenarioSpec> scenarios = enumerate_grid(grid, TrialConstants{});
  REQUIRE(scenarios.size() == 3);  // m in {1, 3, 5}
  REQUIRE(scenarios[0].m_effective == 1);
  REQUIRE(scenarios[1].m_effective == 3);
  REQUIRE(scenarios[2].m_effective == 5);
}

TEST_CASE("grid enumeration rejects malformed grids", "[scenario]") {
  StudyGrid grid;
  grid.k_values = {5};
  grid.n_bound_multipliers = {1};
  grid.mean_kinds = {MeanKind::kGlobalNull};
  grid.entry_kinds = {};
  REQUIRE_THROWS_AS(enumerate_grid(grid, TrialConstants{}), ConfigError);

  grid.entry_kinds = {EntryKind::kFullySeq};
  grid.n_bound_multipliers = {0};
  REQUIRE_THROWS_AS(enumerate_grid(grid, TrialConstants{}), ConfigError);

  grid.n_bound_multipliers = {1};
  grid.mean_kinds = {MeanKind::kFixedEarly};
  grid.m_values = {7};  // more effective arms than arms
  REQUIRE_THROWS_AS(enumerate_grid(grid, TrialConstants{}), ConfigError);
}
