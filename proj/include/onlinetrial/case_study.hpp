#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onlinetrial/batch.hpp"
#include "onlinetrial/errors.hpp"
#include "onlinetrial/format.hpp"
#include "onlinetrial/golden.hpp"
#include "onlinetrial/sequential.hpp"
#include "onlinetrial/static_rules.hpp"

namespace onlinetrial {

// Replay of a real seven-arm platform trial: each arm carries a published
// one-sided p-value, arms were evaluated in four result batches, and the
// horizon was set to 20 hypotheses.  The machinery is generic so other
// trials can be replayed from a user-supplied input.

struct CaseArm {
  std::string label;
  double p = 1.0;
};

struct CaseStudyInput {
  std::vector<CaseArm> arms;     // evaluation order
  std::vector<int> batch_sizes;  // result batches, in order
  int n_bound = 20;
};

// The seven reported arm comparisons in evaluation order; `swapped_first_pair`
// exchanges the first two arms within the opening batch (the published
// sensitivity analysis).
inline CaseStudyInput builtin_case(bool swapped_first_pair) {
  CaseStudyInput input;
  input.arms = {{"B", 0.450}, {"C", 0.006}, {"E", 0.022}, {"D", 0.847},
                {"F", 0.130}, {"G", 0.001}, {"H", 0.266}};
  if (swapped_first_pair) std::swap(input.arms[0], input.arms[1]);
  input.batch_sizes = {3, 2, 1, 1};
  input.n_bound = 20;
  return input;
}

inline void validate_case_input(const CaseStudyInput& input) {
  if (input.arms.empty()) throw DomainError("case study needs at least one arm");
  int total = 0;
  for (int size : input.batch_sizes) {
    if (size < 1) throw DomainError("batch sizes must be positive");
    total += size;
  }
  if (total != static_cast<int>(input.arms.size()))
    throw DomainError("batch sizes must partition the arms");
  if (input.n_bound < static_cast<int>(input.arms.size()))
    throw DomainError("horizon must cover all evaluated arms");
  for (const CaseArm& arm : input.arms) {
    if (arm.label.empty()) throw DomainError("arm labels must be non-empty");
    if (!(arm.p >= 0.0 && arm.p <= 1.0)) throw DomainError("p-value must lie in [0, 1]");
  }
}

struct CaseCell {
  std::string rejected;          // rendered "C, G" style, "--" when empty
  std::optional<double> alpha8;  // level for the next hypothesis after the replay
};

struct CaseRow {
  std::string display;    // published algorithm name
  std::string algorithm;  // roster label
  std::vector<CaseCell> cells;  // one per alpha
};

struct CaseStudyResult {
  std::vector<double> alphas;
  std::vector<CaseRow> rows;
};

namespace detail {

inline std::string render_labels(std::vector<std::string> labels) {
  if (labels.empty()) return "--";
  std::sort(labels.begin(), labels.end());
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += ", ";
    out += labels[i];
  }
  return out;
}

template <typename ProcedureT>
inline CaseCell replay_sequential(ProcedureT procedure, const CaseStudyInput& input) {
  std::vector<std::string> rejected;
  for (const CaseArm& arm : input.arms) {
    if (procedure.test_one(arm.p).rejected) rejected.push_back(arm.label);
  }
  CaseCell cell;
  cell.rejected = render_labels(std::move(rejected));
  cell.alpha8 = procedure.next_level();
  return cell;
}

template <typename ProcedureT>
inline CaseCell replay_batched(ProcedureT procedure, const CaseStudyInput& input) {
  std::vector<double> p_values;
  p_values.reserve(input.arms.size());
  for (const CaseArm& arm : input.arms) p_values.push_back(arm.p);

  std::vector<std::string> rejected;
  std::size_t offset = 0;
  for (int size : input.batch_sizes) {
    const std::span<const double> batch(p_values.data() + offset,
                                        static_cast<std::size_t>(size));
    const std::vector<TestDecision> decisions = procedure.test_batch(batch);
    for (int i = 0; i < size; ++i) {
      if (decisions[static_cast<std::size_t>(i)].rejected)
        rejected.push_back(input.arms[offset + static_cast<std::size_t>(i)].label);
    }
    offset += static_cast<std::size_t>(size);
  }
  CaseCell cell;
  cell.rejected = render_labels(std::move(rejected));
  cell.alpha8 = procedure.next_level();
  return cell;
}

inline CaseCell replay_offline_step_up(const CaseStudyInput& input, double alpha) {
  std::vector<double> p_values;
  p_values.reserve(input.arms.size());
  for (const CaseArm& arm : input.arms) p_values.push_back(arm.p);
  std::vector<std::string> rejected;
  for (int index : bh_procedure(p_values, alpha))
    rejected.push_back(input.arms[static_cast<std::size_t>(index)].label);
  CaseCell cell;
  cell.rejected = render_labels(std::move(rejected));
  return cell;
}

struct CaseRowSpec {
  const char* display;
  const char* label;
};

inline const std::array<CaseRowSpec, 11>& case_row_specs() {
  static const std::array<CaseRowSpec, 11> specs{{{"Uncorrected", "uncorrected"},
                                                  {"Bonferroni", "bonferroni"},
                                                  {"ADDIS-spending", "addis_spending"},
                                                  {"BH", "bh"},
                                                  {"ADDIS", "addis"},
                                                  {"SAFFRON", "saffron"},
                                                  {"LORD", "lord"},
                                                  {"LOND", "lond"},
                                                  {"BatchBH", "batch_bh"},
                                                  {"BatchPRDS", "batch_prds"},
                                                  {"BatchStBH", "batch_stbh"}}};
  return specs;
}

}  // namespace detail

inline std::vector<double> default_case_alphas() { return {0.025, 0.05, 0.1}; }

// Runs the requested algorithms (default: all eleven, in the published row
// order) over the case input at each target level.  Sequential rules consume
// arms in listed order, batch rules consume the batch partition, and the
// offline step-up comparator sees all arms at once.
inline CaseStudyResult run_case_study(
    const CaseStudyInput& input,
    const std::vector<double>& alphas = default_case_alphas(),
    const std::vector<std::string>& algorithms = {}) {
  validate_case_input(input);
  if (alphas.empty()) throw ConfigError("need at least one target level");
  for (double alpha : alphas) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("target levels must lie in (0, 1)");
  }
  for (const std::string& name : algorithms) {
    bool known = false;
    for (const detail::CaseRowSpec& row_spec : detail::case_row_specs())
      known = known || name == row_spec.label;
    if (!known) throw ConfigError("unknown algorithm: " + name);
  }

  CaseStudyResult result;
  result.alphas = alphas;
  const int n_bound = input.n_bound;

  for (const detail::CaseRowSpec& row_spec : detail::case_row_specs()) {
    const std::string label(row_spec.label);
    if (!algorithms.empty() &&
        std::find(algorithms.begin(), algorithms.end(), label) == algorithms.end())
      continue;
    CaseRow row;
    row.display = row_spec.display;
    row.algorithm = label;
    for (double alpha : alphas) {
      CaseCell cell;
      if (label == "uncorrected") {
        cell = detail::replay_sequential(FixedLevel::uncorrected_rule(alpha, n_bound), input);
      } else if (label == "bonferroni") {
        cell = detail::replay_sequential(FixedLevel::bonferroni(alpha, n_bound), input);
      } else if (label == "addis_spending") {
        cell = detail::replay_sequential(AddisSpending::with_defaults(alpha, n_bound), input);
      } else if (label == "bh") {
        cell = detail::replay_offline_step_up(input, alpha);
      } else if (label == "addis") {
        cell = detail::replay_sequential(Addis::with_defaults(alpha, n_bound), input);
      } else if (label == "saffron") {
        cell = detail::replay_sequential(Saffron::with_defaults(alpha, n_bound), input);
      } else if (label == "lord") {
        cell = detail::replay_sequential(Lord::with_defaults(alpha, n_bound), input);
      } else if (label == "lond") {
        cell = detail::replay_sequential(Lond::with_defaults(alpha, n_bound), input);
      } else if (label == "batch_bh") {
        cell = detail::replay_batched(BatchBH::with_defaults(alpha, n_bound), input);
      } else if (label == "batch_prds") {
        cell = detail::replay_batched(BatchPRDS::with_defaults(alpha, n_bound), input);
      } else {
        cell = detail::replay_batched(BatchStBH::with_defaults(alpha, n_bound), input);
      }
      row.cells.push_back(std::move(cell));
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

// Tab-separated rendering: header line, one row per algorithm, levels
// rounded half-up to four decimals, "--" for empty sets and missing levels.
inline std::string render_case_study_tsv(const CaseStudyResult& result) {
  std::string out = "algorithm";
  for (double alpha : result.alphas) out += "\trejected_a" + fixed4(alpha);
  for (double alpha : result.alphas) out += "\tlevel_next_a" + fixed4(alpha);
  out += '\n';
  for (const CaseRow& row : result.rows) {
    out += row.display;
    for (const CaseCell& cell : row.cells) {
      out += '\t';
      out += cell.rejected;
    }
    for (const CaseCell& cell : row.cells) {
      out += '\t';
      out += cell.alpha8 ? fixed4(*cell.alpha8) : "--";
    }
    out += '\n';
  }
  return out;
}

// Cell-level comparison against a reference table.  Set cells must match
// exactly; level cells match when both are absent or the computed value,
// rounded as published, is within the tolerance.
struct CellMismatch {
  std::string algorithm;
  std::string cell;  // e.g. "rejected@0.05" or "level_next@0.1"
  std::string expected;
  std::string observed;
};

inline std::vector<CellMismatch> compare_to_golden(const CaseStudyResult& result,
                                                   const GoldenTable& golden,
                                                   double level_tolerance = 0.00005) {
  std::vector<CellMismatch> mismatches;
  if (result.rows.size() != golden.rows.size())
    throw DomainError("row count mismatch against the reference table");
  if (result.alphas.size() != 3)
    throw DomainError("reference comparison needs the three published levels");
  static const std::array<const char*, 3> kAlphaNames{"0.025", "0.05", "0.1"};
  for (std::size_t r = 0; r < result.rows.size(); ++r) {
    const CaseRow& row = result.rows[r];
    const GoldenRow& ref = golden.rows[r];
    if (row.algorithm != ref.algorithm)
      throw DomainError("row order mismatch against the reference table");
    for (std::size_t a = 0; a < 3; ++a) {
      const CaseCell& cell = row.cells[a];
      if (cell.rejected != ref.rejected[a]) {
        mismatches.push_back({row.algorithm, std::string("rejected@") + kAlphaNames[a],
                              ref.rejected[a], cell.rejected});
      }
      const bool ref_has_level = !std::isnan(ref.alpha8[a]);
      if (ref_has_level != cell.alpha8.has_value()) {
        mismatches.push_back({row.algorithm, std::string("level_next@") + kAlphaNames[a],
                              ref_has_level ? fixed4(ref.alpha8[a]) : "--",
                              cell.alpha8 ? fixed4(*cell.alpha8) : "--"});
      } else if (ref_has_level &&
                 std::abs(round4_half_up(*cell.alpha8) - ref.alpha8[a]) > level_tolerance) {
        mismatches.push_back({row.algorithm, std::string("level_next@") + kAlphaNames[a],
                              fixed4(ref.alpha8[a]), fixed4(*cell.alpha8)});
      }
    }
  }
  return mismatches;
}

}  // namespace onlinetrial
