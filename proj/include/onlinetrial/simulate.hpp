#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "onlinetrial/config.hpp"
#include "onlinetrial/errors.hpp"
#include "onlinetrial/format.hpp"
#include "onlinetrial/metrics.hpp"
#include "onlinetrial/scenario.hpp"

namespace onlinetrial {

inline const char* kCsvHeader =
    "scenario_id,K,n_bound,entry_pattern,mean_pattern,m,algorithm,alpha,metric,"
    "estimate,mc_se,reps,seed";

namespace detail {

inline std::string csv_row(const ScenarioSpec& spec, const StudyCell& cell,
                           const char* metric, const MetricEstimate& estimate,
                           std::uint64_t base_seed) {
  std::string row;
  row += spec.scenario_id;
  row += ',';
  row += std::to_string(spec.trial.k_arms);
  row += ',';
  row += std::to_string(spec.trial.n_bound);
  row += ',';
  row += entry_kind_label(spec.entry_kind);
  row += ',';
  row += mean_kind_label(spec.mean_kind);
  row += ',';
  row += std::to_string(spec.m_effective);
  row += ',';
  row += cell.algorithm;
  row += ',';
  row += fixed6(spec.trial.alpha);
  row += ',';
  row += metric;
  row += ',';
  row += fixed6(estimate.estimate);
  row += ',';
  row += fixed6(estimate.mc_se);
  row += ',';
  row += std::to_string(cell.reps);
  row += ',';
  row += std::to_string(base_seed);
  return row;
}

}  // namespace detail

// Renders one scenario's results as unsorted CSV data rows.
inline std::vector<std::string> csv_rows_for(const ScenarioResult& result,
                                             std::uint64_t base_seed) {
  std::vector<std::string> rows;
  for (const StudyCell& cell : result.cells) {
    rows.push_back(detail::csv_row(result.spec, cell, "fdr", cell.fdr, base_seed));
    rows.push_back(detail::csv_row(result.spec, cell, "fwer", cell.fwer, base_seed));
    if (cell.sensitivity)
      rows.push_back(
          detail::csv_row(result.spec, cell, "sensitivity", *cell.sensitivity, base_seed));
    if (cell.disjunctive_power)
      rows.push_back(detail::csv_row(result.spec, cell, "disjunctive_power",
                                     *cell.disjunctive_power, base_seed));
  }
  return rows;
}

// Runs the whole configured study and renders the CSV document: header, data
// rows in lexicographic order, trailing newline.  Output is identical for
// any thread count because every replication's contribution is scored into a
// preassigned slot before any aggregation happens.
inline std::string run_simulation_csv(const StudyConfig& config, int threads) {
  if (config.algorithms.empty())
    throw ConfigError("algorithms must name at least one algorithm");
  const std::vector<ScenarioSpec> scenarios =
      enumerate_grid(config.grid, config.constants);

  std::vector<std::string> rows;
  for (const ScenarioSpec& spec : scenarios) {
    const ScenarioResult result =
        run_scenario(spec, config.algorithms, config.reps, config.base_seed, threads);
    std::vector<std::string> scenario_rows = csv_rows_for(result, config.base_seed);
    rows.insert(rows.end(), std::make_move_iterator(scenario_rows.begin()),
                std::make_move_iterator(scenario_rows.end()));
  }
  std::sort(rows.begin(), rows.end());

  std::string csv = kCsvHeader;
  csv += '\n';
  for (const std::string& row : rows) {
    csv += row;
    csv += '\n';
  }
  return csv;
}

// Writes via a sibling temporary file plus rename, so a crash never leaves a
// half-written table at the destination.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string temp = path + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file: " + temp);
    out << content;
    out.flush();
    if (!out) {
      std::remove(temp.c_str());
      throw ConfigError("failed writing output file: " + temp);
    }
  }
  if (std::rename(temp.c_str(), path.c_str()) != 0) {
    std::remove(temp.c_str());
    throw ConfigError("failed moving output into place: " + path);
  }
}

}  // namespace onlinetrial
