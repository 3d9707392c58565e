#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "onlinetrial/case_study.hpp"
#include "onlinetrial/errors.hpp"
#include "onlinetrial/metrics.hpp"
#include "onlinetrial/scenario.hpp"

namespace onlinetrial {

// Full study configuration.  Every field has a default matching the published
// simulation set-up, so an empty JSON object is a valid (full-size) study.
struct StudyConfig {
  StudyGrid grid;
  TrialConstants constants;
  std::vector<AlgorithmSpec> algorithms;
  int reps = 10000;
  std::uint64_t base_seed = 20240614;
  std::string output = "study.csv";
};

inline StudyConfig default_study_config() {
  StudyConfig config;
  config.grid.k_values = {5, 10, 15, 20};
  config.grid.n_bound_multipliers = {1, 2, 5};
  config.grid.mean_kinds = {MeanKind::kGlobalNull, MeanKind::kFixedEarly,
                            MeanKind::kFixedLate,  MeanKind::kFixedRandom,
                            MeanKind::kStairDec,   MeanKind::kStairInc,
                            MeanKind::kStairRandom};
  config.grid.entry_kinds = {EntryKind::kAllAtOnce, EntryKind::kBatch5,
                             EntryKind::kStagger2, EntryKind::kStagger5,
                             EntryKind::kFullySeq};
  // grid.m_values left empty: per-K defaults {1, K/5+1, 2K/5+1}.
  for (AlgorithmKind kind : all_algorithms()) {
    AlgorithmSpec spec;
    spec.kind = kind;
    config.algorithms.push_back(spec);
  }
  return config;
}

namespace detail {

using json = nlohmann::json;

inline void require_keys(const json& object, const std::string& where,
                         const std::vector<std::string>& allowed) {
  if (!object.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : object.items()) {
    bool known = false;
    for (const std::string& key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
  }
}

inline std::vector<int> int_array(const json& value, const std::string& where) {
  if (!value.is_array()) throw ConfigError(where + " must be an array");
  std::vector<int> out;
  for (const auto& element : value) {
    if (!element.is_number_integer())
      throw ConfigError(where + " must contain integers only");
    out.push_back(element.get<int>());
  }
  return out;
}

inline double number_at(const json& value, const std::string& where) {
  if (!value.is_number()) throw ConfigError(where + " must be a number");
  return value.get<double>();
}

inline GammaKind gamma_kind_from_label(const std::string& label) {
  if (label == "constant") return GammaKind::kConstant;
  if (label == "powerlaw") return GammaKind::kPowerLaw;
  if (label == "lordlog") return GammaKind::kLordLog;
  throw ConfigError("unknown discount sequence: " + label);
}

inline AlgorithmSpec parse_algorithm(const json& value) {
  AlgorithmSpec spec;
  if (value.is_string()) {
    spec.kind = algorithm_from_label(value.get<std::string>());
    return spec;
  }
  require_keys(value, "algorithms[]",
               {"name", "gamma", "gamma_exponent", "lambda", "tau", "w0", "b0"});
  if (!value.contains("name") || !value.at("name").is_string())
    throw ConfigError("each algorithm needs a string \"name\"");
  spec.kind = algorithm_from_label(value.at("name").get<std::string>());
  if (value.contains("gamma")) {
    if (!value.at("gamma").is_string())
      throw ConfigError("algorithms[].gamma must be a string");
    spec.gamma_kind = gamma_kind_from_label(value.at("gamma").get<std::string>());
  }
  if (value.contains("gamma_exponent"))
    spec.gamma_exponent = number_at(value.at("gamma_exponent"), "algorithms[].gamma_exponent");
  if (value.contains("lambda")) spec.lambda = number_at(value.at("lambda"), "algorithms[].lambda");
  if (value.contains("tau")) spec.tau = number_at(value.at("tau"), "algorithms[].tau");
  if (value.contains("w0")) spec.w0 = number_at(value.at("w0"), "algorithms[].w0");
  if (value.contains("b0")) spec.b0 = number_at(value.at("b0"), "algorithms[].b0");
  return spec;
}

}  // namespace detail

// Parses a strict-JSON study configuration: unknown keys anywhere are fatal,
// and values replace (never merge with) the published defaults.
inline StudyConfig parse_study_config(const std::string& text) {
  using detail::json;
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& error) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + error.what());
  }

  StudyConfig config = default_study_config();
  detail::require_keys(document, "configuration",
                       {"grid", "trial", "algorithms", "reps", "base_seed", "output"});

  if (document.contains("grid")) {
    const json& grid = document.at("grid");
    detail::require_keys(grid, "grid",
                         {"k_values", "n_bound_multipliers", "mean_scenarios",
                          "entry_patterns", "m_values"});
    if (grid.contains("k_values"))
      config.grid.k_values = detail::int_array(grid.at("k_values"), "grid.k_values");
    if (grid.contains("n_bound_multipliers"))
      config.grid.n_bound_multipliers =
          detail::int_array(grid.at("n_bound_multipliers"), "grid.n_bound_multipliers");
    if (grid.contains("mean_scenarios")) {
      if (!grid.at("mean_scenarios").is_array())
        throw ConfigError("grid.mean_scenarios must be an array");
      config.grid.mean_kinds.clear();
      for (const auto& element : grid.at("mean_scenarios")) {
        if (!element.is_string())
          throw ConfigError("grid.mean_scenarios must contain strings");
        config.grid.mean_kinds.push_back(mean_kind_from_label(element.get<std::string>()));
      }
    }
    if (grid.contains("entry_patterns")) {
      if (!grid.at("entry_patterns").is_array())
        throw ConfigError("grid.entry_patterns must be an array");
      config.grid.entry_kinds.clear();
      for (const auto& element : grid.at("entry_patterns")) {
        if (!element.is_string())
          throw ConfigError("grid.entry_patterns must contain strings");
        config.grid.entry_kinds.push_back(entry_kind_from_label(element.get<std::string>()));
      }
    }
    if (grid.contains("m_values"))
      config.grid.m_values = detail::int_array(grid.at("m_values"), "grid.m_values");
  }

  if (document.contains("trial")) {
    const json& trial = document.at("trial");
    detail::require_keys(trial, "trial", {"n", "r", "sigma", "alpha", "mu0"});
    if (trial.contains("n")) {
      if (!trial.at("n").is_number_integer()) throw ConfigError("trial.n must be an integer");
      config.constants.n_per_arm = trial.at("n").get<int>();
    }
    if (trial.contains("r")) {
      if (!trial.at("r").is_number_integer()) throw ConfigError("trial.r must be an integer");
      config.constants.duration = trial.at("r").get<int>();
    }
    if (trial.contains("sigma"))
      config.constants.sigma = detail::number_at(trial.at("sigma"), "trial.sigma");
    if (trial.contains("alpha"))
      config.constants.alpha = detail::number_at(trial.at("alpha"), "trial.alpha");
    if (trial.contains("mu0"))
      config.constants.mu0 = detail::number_at(trial.at("mu0"), "trial.mu0");
  }

  if (document.contains("algorithms")) {
    if (!document.at("algorithms").is_array())
      throw ConfigError("algorithms must be an array");
    config.algorithms.clear();
    for (const auto& element : document.at("algorithms"))
      config.algorithms.push_back(detail::parse_algorithm(element));
    if (config.algorithms.empty())
      throw ConfigError("algorithms must name at least one algorithm");
  }

  if (document.contains("reps")) {
    if (!document.at("reps").is_number_integer())
      throw ConfigError("reps must be an integer");
    config.reps = document.at("reps").get<int>();
    if (config.reps < 2) throw ConfigError("reps must be at least 2");
  }

  if (document.contains("base_seed")) {
    if (!document.at("base_seed").is_number_unsigned() &&
        !document.at("base_seed").is_number_integer())
      throw ConfigError("base_seed must be a non-negative integer");
    const auto seed = document.at("base_seed").get<std::int64_t>();
    if (seed < 0) throw ConfigError("base_seed must be a non-negative integer");
    config.base_seed = static_cast<std::uint64_t>(seed);
  }

  if (document.contains("output")) {
    if (!document.at("output").is_string()) throw ConfigError("output must be a string");
    config.output = document.at("output").get<std::string>();
    if (config.output.empty()) throw ConfigError("output path must be non-empty");
  }

  return config;
}

inline StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open configuration file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_study_config(buffer.str());
}

// External case-replay input: ordered arm records with batch ids, optional
// target levels, and the hypothesis horizon.  Batch ids must be
// non-decreasing; batch sizes are the run lengths of equal ids.
struct CaseReplayFile {
  CaseStudyInput input;
  std::vector<double> alphas = default_case_alphas();
};

inline CaseReplayFile parse_case_input(const std::string& text) {
  using detail::json;
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& error) {
    throw ConfigError(std::string("case input is not valid JSON: ") + error.what());
  }
  detail::require_keys(document, "case input", {"arms", "alphas", "n_bound"});
  if (!document.contains("arms") || !document.at("arms").is_array() ||
      document.at("arms").empty())
    throw ConfigError("case input needs a non-empty \"arms\" array");

  CaseReplayFile replay;
  replay.input.arms.clear();
  replay.input.batch_sizes.clear();
  int previous_batch = 0;
  bool first = true;
  for (const auto& element : document.at("arms")) {
    detail::require_keys(element, "arms[]", {"label", "p", "batch"});
    if (!element.contains("label") || !element.at("label").is_string())
      throw ConfigError("each arm needs a string \"label\"");
    if (!element.contains("p")) throw ConfigError("each arm needs a p-value \"p\"");
    if (!element.contains("batch") || !element.at("batch").is_number_integer())
      throw ConfigError("each arm needs an integer \"batch\"");
    const int batch = element.at("batch").get<int>();
    if (!first && batch < previous_batch)
      throw ConfigError("arm batch ids must be non-decreasing");
    if (first || batch != previous_batch) {
      replay.input.batch_sizes.push_back(1);
    } else {
      ++replay.input.batch_sizes.back();
    }
    previous_batch = batch;
    first = false;
    CaseArm arm;
    arm.label = element.at("label").get<std::string>();
    arm.p = detail::number_at(element.at("p"), "arms[].p");
    replay.input.arms.push_back(std::move(arm));
  }

  if (document.contains("n_bound")) {
    if (!document.at("n_bound").is_number_integer())
      throw ConfigError("n_bound must be an integer");
    replay.input.n_bound = document.at("n_bound").get<int>();
  }
  if (document.contains("alphas")) {
    if (!document.at("alphas").is_array() || document.at("alphas").empty())
      throw ConfigError("alphas must be a non-empty array");
    replay.alphas.clear();
    for (const auto& element : document.at("alphas"))
      replay.alphas.push_back(detail::number_at(element, "alphas[]"));
  }

  try {
    validate_case_input(replay.input);
  } catch (const DomainError& error) {
    throw ConfigError(std::string("invalid case input: ") + error.what());
  }
  return replay;
}

inline CaseReplayFile load_case_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open case input file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_case_input(buffer.str());
}

}  // namespace onlinetrial
