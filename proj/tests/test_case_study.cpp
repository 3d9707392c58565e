#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "onlinetrial/case_study.hpp"
#include "onlinetrial/format.hpp"
#include "onlinetrial/golden.hpp"

using onlinetrial::builtin_case;
using onlinetrial::CaseStudyInput;
using onlinetrial::CaseStudyResult;
using onlinetrial::CellMismatch;
using onlinetrial::compare_to_golden;
using onlinetrial::ConfigError;
using onlinetrial::default_case_alphas;
using onlinetrial::DomainError;
using onlinetrial::fixed4;
using onlinetrial::golden_default_order;
using onlinetrial::golden_swapped_order;
using onlinetrial::render_case_study_tsv;
using onlinetrial::round4_half_up;
using onlinetrial::run_case_study;
using onlinetrial::validate_case_input;

TEST_CASE("built-in record and its swapped variant", "[case]") {
  const CaseStudyInput base = builtin_case(false);
  REQUIRE(base.arms.size() == 7);
  REQUIRE(base.arms[0].label == "B");
  REQUIRE(base.arms[0].p == 0.450);
  REQUIRE(base.arms[1].label == "C");
  REQUIRE(base.arms[1].p == 0.006);
  REQUIRE(base.arms[5].label == "G");
  REQUIRE(base.arms[5].p == 0.001);
  REQUIRE(base.batch_sizes == std::vector<int>{3, 2, 1, 1});
  REQUIRE(base.n_bound == 20);

  const CaseStudyInput swapped = builtin_case(true);
  REQUIRE(swapped.arms[0].label == "C");
  REQUIRE(swapped.arms[1].label == "B");
  // Only the first two entries change.
  for (std::size_t i = 2; i < 7; ++i)
    REQUIRE(swapped.arms[i].label == base.arms[i].label);
}

TEST_CASE("case input validation", "[case]") {
  CaseStudyInput input = builtin_case(false);
  REQUIRE_NOTHROW(validate_case_input(input));

  input.arms.clear();
  input.batch_sizes.clear();
  REQUIRE_THROWS_AS(validate_case_input(input), DomainError);

  input = builtin_case(false);
  input.batch_sizes = {3, 2, 1};  // partitions six arms, not seven
  REQUIRE_THROWS_AS(validate_case_input(input), DomainError);

  input = builtin_case(false);
  input.batch_sizes = {3, 2, 1, 0, 1};
  REQUIRE_THROWS_AS(validate_case_input(input), DomainError);

  input = builtin_case(false);
  input.n_bound = 6;
  REQUIRE_THROWS_AS(validate_case_input(input), DomainError);

  input = builtin_case(false);
  input.arms[0].p = 1.5;
  REQUIRE_THROWS_AS(validate_case_input(input), DomainError);

  input = builtin_case(false);
  input.arms[0].label.clear();
  REQUIRE_THROWS_AS(validate_case_input(input), DomainError);
}

TEST_CASE("replay emits all eleven rows in published order", "[case]") {
  const CaseStudyResult result = run_case_study(builtin_case(false));
  REQUIRE(result.alphas == default_case_alphas());
  REQUIRE(result.rows.size() == 11);
  const std::vector<std::string> labels = {
      "uncorrected", "bonferroni", "addis_spending", "bh",       "addis",     "saffron",
      "lord",        "lond",       "batch_bh",       "batch_prds", "batch_stbh"};
  const std::vector<std::string> displays = {
      "Uncorrected", "Bonferroni", "ADDIS-spending", "BH",        "ADDIS",     "SAFFRON",
      "LORD",        "LOND",       "BatchBH",        "BatchPRDS", "BatchStBH"};
  for (std::size_t i = 0; i < 11; ++i) {
    REQUIRE(result.rows[i].algorithm == labels[i]);
    REQUIRE(result.rows[i].display == displays[i]);
    REQUIRE(result.rows[i].cells.size() == 3);
  }
}

TEST_CASE("replay spot checks against hand-verified cells", "[case]") {
  const CaseStudyResult result = run_case_study(builtin_case(false));

  const auto& uncorrected = result.rows[0];
  for (std::size_t a = 0; a < 3; ++a) {
    REQUIRE(uncorrected.cells[a].rejected == "C, E, G");
    REQUIRE(uncorrected.cells[a].alpha8.has_value());
    REQUIRE(*uncorrected.cells[a].alpha8 == result.alphas[a]);
  }

  const auto& step_up = result.rows[3];
  REQUIRE(step_up.algorithm == "bh");
  REQUIRE(step_up.cells[0].rejected == "C, G");
  REQUIRE(step_up.cells[2].rejected == "C, E, G");
  // The offline comparator has no online level to report.
  for (const auto& cell : step_up.cells) REQUIRE_FALSE(cell.alpha8.has_value());

  const auto& lond = result.rows[7];
  REQUIRE(lond.algorithm == "lond");
  for (std::size_t a = 0; a < 3; ++a) REQUIRE(lond.cells[a].rejected == "G");
  REQUIRE(fixed4(*lond.cells[0].alpha8) == "0.0025");
  REQUIRE(fixed4(*lond.cells[1].alpha8) == "0.0050");
  REQUIRE(fixed4(*lond.cells[2].alpha8) == "0.0100");

  const auto& lord = result.rows[6];
  REQUIRE(lord.cells[0].rejected == "--");
}

TEST_CASE("default-order replay deviates from the reference only in the frozen cells",
          "[case]") {
  const CaseStudyResult result = run_case_study(builtin_case(false));
  const std::vector<CellMismatch> mismatches =
      compare_to_golden(result, golden_default_order());
  // The earned-budget batch rule reproduces every published rejection set but
  // renders different next-batch levels; those three cells are the only
  // deviations and are documented in the README.
  REQUIRE(mismatches.size() == 3);
  const std::vector<std::string> observed = {"0.0273", "0.0546", "0.1092"};
  const std::vector<std::string> expected = {"0.0381", "0.1015", "0.1238"};
  const std::vector<std::string> cells = {"level_next@0.025", "level_next@0.05",
                                          "level_next@0.1"};
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(mismatches[i].algorithm == "batch_stbh");
    REQUIRE(mismatches[i].cell == cells[i]);
    REQUIRE(mismatches[i].expected == expected[i]);
    REQUIRE(mismatches[i].observed == observed[i]);
  }
}

TEST_CASE("swapped-order replay deviates from the reference only in the frozen cells",
          "[case]") {
  const CaseStudyResult result = run_case_study(builtin_case(true));
  const std::vector<CellMismatch> mismatches =
      compare_to_golden(result, golden_swapped_order());
  REQUIRE(mismatches.size() == 3);
  for (const CellMismatch& mismatch : mismatches) {
    REQUIRE(mismatch.algorithm == "batch_stbh");
    REQUIRE(mismatch.cell.rfind("level_next@", 0) == 0);
  }
}

TEST_CASE("swapping the first two arms changes the order-sensitive rows", "[case]") {
  const CaseStudyResult base = run_case_study(builtin_case(false));
  const CaseStudyResult swapped = run_case_study(builtin_case(true));

  // The discarding rule sees a conservative p-value earlier, which frees
  // budget: at the top level it now also rejects the second arm.
  REQUIRE(base.rows[4].algorithm == "addis");
  REQUIRE(base.rows[4].cells[2].rejected == "G");
  REQUIRE(swapped.rows[4].cells[2].rejected == "C, G");

  REQUIRE(base.rows[2].algorithm == "addis_spending");
  REQUIRE(base.rows[2].cells[1].rejected == "G");
  REQUIRE(swapped.rows[2].cells[1].rejected == "C, G");

  // Order-insensitive rows do not move.
  REQUIRE(base.rows[3].cells[1].rejected == swapped.rows[3].cells[1].rejected);
  REQUIRE(base.rows[7].cells[1].rejected == swapped.rows[7].cells[1].rejected);
}

TEST_CASE("algorithm filter restricts and validates", "[case]") {
  const CaseStudyResult result =
      run_case_study(builtin_case(false), default_case_alphas(), {"lond", "bh"});
  REQUIRE(result.rows.size() == 2);
  REQUIRE(result.rows[0].algorithm == "bh");  // published row order is kept
  REQUIRE(result.rows[1].algorithm == "lond");

  REQUIRE_THROWS_AS(
      run_case_study(builtin_case(false), default_case_alphas(), {"nope"}), ConfigError);
}

TEST_CASE("replay accepts custom target levels", "[case]") {
  const CaseStudyResult result = run_case_study(builtin_case(false), {0.2});
  REQUIRE(result.alphas == std::vector<double>{0.2});
  for (const auto& row : result.rows) REQUIRE(row.cells.size() == 1);
  REQUIRE_THROWS_AS(run_case_study(builtin_case(false), {}), ConfigError);
  REQUIRE_THROWS_AS(run_case_study(builtin_case(false), {0.0}), ConfigError);
}

TEST_CASE("tabular rendering", "[case]") {
  const CaseStudyResult result =
      run_case_study(builtin_case(false), default_case_alphas(), {"lond", "bh"});
  const std::string tsv = render_case_study_tsv(result);
  REQUIRE(tsv.rfind("algorithm\trejected_a0.0250\trejected_a0.0500\trejected_a0.1000\t"
                    "level_next_a0.0250\tlevel_next_a0.0500\tlevel_next_a0.1000\n",
                    0) == 0);
  REQUIRE(tsv.find("BH\tC, G\tC, G\tC, E, G\t--\t--\t--\n") != std::string::npos);
  REQUIRE(tsv.find("LOND\tG\tG\tG\t0.0025\t0.0050\t0.0100\n") != std::string::npos);
}

TEST_CASE("reference comparison insists on comparable shapes", "[case]") {
  const CaseStudyResult filtered =
      run_case_study(builtin_case(false), default_case_alphas(), {"lond"});
  REQUIRE_THROWS_AS(compare_to_golden(filtered, golden_default_order()), DomainError);

  const CaseStudyResult two_levels = run_case_study(builtin_case(false), {0.025, 0.05});
  REQUIRE_THROWS_AS(compare_to_golden(two_levels, golden_default_order()), DomainError);
}

TEST_CASE("half-up rounding at four decimals", "[case]") {
  REQUIRE(round4_half_up(0.00125) == 0.0013);
  REQUIRE(round4_half_up(0.00124999) == 0.0012);
  REQUIRE(fixed4(0.00125) == "0.0013");
  REQUIRE(fixed4(0.025) == "0.0250");
}
