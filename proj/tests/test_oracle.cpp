#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "onlinetrial/oracle.hpp"

using onlinetrial::analytic_control_correlation;
using onlinetrial::bh_equivalence_mismatches;
using onlinetrial::closed_form_lond_level;
using onlinetrial::DomainError;
using onlinetrial::empirical_uncorrected_fwer;
using onlinetrial::empirical_z_correlation;
using onlinetrial::independent_fwer_closed_form;
using onlinetrial::make_report;
using onlinetrial::naive_bh;
using onlinetrial::OracleReport;
using onlinetrial::OracleSettings;
using onlinetrial::run_oracle_suite;

namespace {
constexpr double kTight = 1e-12;
const std::vector<double> kSevenPs = {0.450, 0.006, 0.022, 0.847, 0.130, 0.001, 0.266};
}

TEST_CASE("closed-form discovery-scaled levels", "[oracle]") {
  REQUIRE_THAT(closed_form_lond_level(0.025, 20, 1, 0),
               Catch::Matchers::WithinAbs(0.00125, kTight));
  REQUIRE_THAT(closed_form_lond_level(0.025, 20, 8, 1),
               Catch::Matchers::WithinAbs(0.0025, kTight));
  REQUIRE_THAT(closed_form_lond_level(0.1, 20, 8, 1),
               Catch::Matchers::WithinAbs(0.01, kTight));
  REQUIRE_THROWS_AS(closed_form_lond_level(0.0, 20, 1, 0), DomainError);
  REQUIRE_THROWS_AS(closed_form_lond_level(0.025, 0, 1, 0), DomainError);
  REQUIRE_THROWS_AS(closed_form_lond_level(0.025, 20, 0, 0), DomainError);
  REQUIRE_THROWS_AS(closed_form_lond_level(0.025, 20, 21, 0), DomainError);
  // More discoveries than preceding tests is impossible.
  REQUIRE_THROWS_AS(closed_form_lond_level(0.025, 20, 3, 3), DomainError);
  REQUIRE_THROWS_AS(closed_form_lond_level(0.025, 20, 3, -1), DomainError);
}

TEST_CASE("naive step-up transcription on known instances", "[oracle]") {
  REQUIRE(naive_bh(kSevenPs, 0.025) == std::vector<int>{1, 5});
  REQUIRE(naive_bh(kSevenPs, 0.05) == std::vector<int>{1, 5});
  REQUIRE(naive_bh(kSevenPs, 0.1) == std::vector<int>{1, 2, 5});
  REQUIRE(naive_bh({}, 0.05).empty());
  REQUIRE(naive_bh({0.04}, 0.05) == std::vector<int>{0});
  REQUIRE(naive_bh({0.06}, 0.05).empty());
  REQUIRE(naive_bh({0.01, 0.01, 0.9}, 0.05) == std::vector<int>{0, 1});
}

TEST_CASE("analytic correlation of overlapping control windows", "[oracle]") {
  REQUIRE(analytic_control_correlation(50, 50) == 0.5);
  REQUIRE(analytic_control_correlation(25, 50) == 0.25);
  REQUIRE(analytic_control_correlation(0, 50) == 0.0);
  REQUIRE_THROWS_AS(analytic_control_correlation(-1, 50), DomainError);
  REQUIRE_THROWS_AS(analytic_control_correlation(51, 50), DomainError);
  REQUIRE_THROWS_AS(analytic_control_correlation(0, 0), DomainError);
}

TEST_CASE("closed-form familywise error under independence", "[oracle]") {
  // 1 - 0.975^20 and 1 - 0.95^10, frozen at 12 decimals.
  REQUIRE_THAT(independent_fwer_closed_form(0.025, 20),
               Catch::Matchers::WithinAbs(0.397312319781, kTight));
  REQUIRE_THAT(independent_fwer_closed_form(0.05, 10),
               Catch::Matchers::WithinAbs(0.401263060762, kTight));
  REQUIRE_THAT(independent_fwer_closed_form(0.025, 1),
               Catch::Matchers::WithinAbs(0.025, 1e-15));
  REQUIRE_THROWS_AS(independent_fwer_closed_form(0.0, 20), DomainError);
  REQUIRE_THROWS_AS(independent_fwer_closed_form(0.025, 0), DomainError);
}

TEST_CASE("production step-up and naive transcription agree", "[oracle]") {
  REQUIRE(bh_equivalence_mismatches(5000, 25, 20240614) == 0);
  REQUIRE_THROWS_AS(bh_equivalence_mismatches(0, 25, 1), DomainError);
  REQUIRE_THROWS_AS(bh_equivalence_mismatches(10, 0, 1), DomainError);
}

TEST_CASE("disjoint control windows give uncorrelated statistics", "[oracle]") {
  const double corr = empirical_z_correlation(10, 2000, 7);
  REQUIRE(std::abs(corr) < 3.0 / std::sqrt(2000.0));
}

TEST_CASE("shared control windows give positively correlated statistics", "[oracle]") {
  const double corr = empirical_z_correlation(0, 2000, 7);
  REQUIRE_THAT(corr, Catch::Matchers::WithinAbs(0.5, 3.0 * 0.75 / std::sqrt(2000.0)));
}

TEST_CASE("empirical familywise error tracks the closed form", "[oracle]") {
  const double expected = independent_fwer_closed_form(0.025, 20);
  const double observed = empirical_uncorrected_fwer(20, 2000, 7);
  const double se = std::sqrt(expected * (1.0 - expected) / 2000.0);
  REQUIRE_THAT(observed, Catch::Matchers::WithinAbs(expected, 3.0 * se));
}

TEST_CASE("report construction applies the tolerance", "[oracle]") {
  REQUIRE(make_report("x", 1.0, 1.005, 0.01, "why").passed);
  REQUIRE_FALSE(make_report("x", 1.0, 1.02, 0.01, "why").passed);
  REQUIRE(make_report("x", 2.5, 2.5, 0.0, "why").passed);
}

TEST_CASE("the full field-check suite passes", "[oracle][slow]") {
  OracleSettings settings;
  settings.bh_instances = 4000;
  settings.correlation_reps = 4000;
  settings.fwer_reps = 4000;
  const std::vector<OracleReport> reports = run_oracle_suite(settings);
  REQUIRE(reports.size() == 8);
  std::set<std::string> names;
  for (const OracleReport& report : reports) {
    INFO(report.name << ": expected " << report.expected << ", observed "
                     << report.observed << ", tolerance " << report.tolerance);
    REQUIRE(report.passed);
    REQUIRE_FALSE(report.basis.empty());
    names.insert(report.name);
  }
  REQUIRE(names.size() == reports.size());
}
