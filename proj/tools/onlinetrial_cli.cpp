// Command-line front end: Monte Carlo study runner, case replay, and field
// validation for the online error-control library.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "onlinetrial/case_study.hpp"
#include "onlinetrial/config.hpp"
#include "onlinetrial/errors.hpp"
#include "onlinetrial/format.hpp"
#include "onlinetrial/golden.hpp"
#include "onlinetrial/metrics.hpp"
#include "onlinetrial/oracle.hpp"
#include "onlinetrial/simulate.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

// Thread budget: explicit flag first, then the ONLINETRIAL_THREADS
// environment variable, then one worker per hardware thread.
int resolve_thread_request(int flag_value) {
  if (flag_value > 0) return flag_value;
  const char* env = std::getenv("ONLINETRIAL_THREADS");
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == nullptr || *end != '\0' || value < 1)
      throw onlinetrial::ConfigError(
          "ONLINETRIAL_THREADS must be a positive integer");
    return static_cast<int>(value);
  }
  return 0;  // auto
}

struct SimulateOptions {
  std::string config_path;
  int reps = 0;
  std::int64_t seed = -1;
  std::string output;
  int threads = 0;
};

int cmd_simulate(const SimulateOptions& options) {
  using namespace onlinetrial;
  StudyConfig config = options.config_path.empty()
                           ? default_study_config()
                           : load_study_config(options.config_path);
  if (options.reps != 0) {
    if (options.reps < 2) throw ConfigError("reps must be at least 2");
    config.reps = options.reps;
  }
  if (options.seed >= 0) config.base_seed = static_cast<std::uint64_t>(options.seed);
  if (!options.output.empty()) config.output = options.output;

  const int threads = resolve_thread_request(options.threads);
  const std::string csv = run_simulation_csv(config, threads);
  write_file_atomic(config.output, csv);

  std::size_t rows = 0;
  for (char c : csv) rows += (c == '\n') ? 1 : 0;
  std::cout << "wrote " << config.output << ": " << (rows - 1) << " data rows, "
            << config.reps << " replications per scenario, seed " << config.base_seed
            << "\n";
  return kExitSuccess;
}

struct CaseStudyOptions {
  std::string order = "default";
  std::string input_path;
  std::vector<double> alphas;
  int n_bound = 0;
  std::vector<std::string> algorithms;
};

int cmd_case_study(const CaseStudyOptions& options) {
  using namespace onlinetrial;
  CaseReplayFile replay;
  if (!options.input_path.empty()) {
    replay = load_case_input(options.input_path);
  } else {
    replay.input = builtin_case(options.order == "swapped");
  }
  if (!options.alphas.empty()) replay.alphas = options.alphas;
  if (options.n_bound != 0) {
    if (options.n_bound < static_cast<int>(replay.input.arms.size()))
      throw ConfigError("horizon must cover all evaluated arms");
    replay.input.n_bound = options.n_bound;
  }
  const CaseStudyResult result =
      run_case_study(replay.input, replay.alphas, options.algorithms);
  std::cout << render_case_study_tsv(result);
  return kExitSuccess;
}

void print_oracle_report(const onlinetrial::OracleReport& report) {
  std::cout << report.name << '\t' << (report.passed ? "pass" : "FAIL") << '\t'
            << "expected=" << onlinetrial::fixed6(report.expected) << '\t'
            << "observed=" << onlinetrial::fixed6(report.observed) << '\t'
            << "tolerance=" << onlinetrial::fixed6(report.tolerance) << '\t'
            << report.basis << '\n';
}

int cmd_validate() {
  using namespace onlinetrial;
  int failures = 0;

  for (const OracleReport& report : run_oracle_suite(OracleSettings{})) {
    print_oracle_report(report);
    if (!report.passed) ++failures;
  }

  const struct {
    const char* name;
    bool swapped;
  } tables[] = {{"case_table_default", false}, {"case_table_swapped", true}};
  for (const auto& table : tables) {
    const CaseStudyResult result = run_case_study(builtin_case(table.swapped));
    const GoldenTable& golden =
        table.swapped ? golden_swapped_order() : golden_default_order();
    const std::vector<CellMismatch> mismatches = compare_to_golden(result, golden);
    std::cout << table.name << '\t' << (mismatches.empty() ? "pass" : "FAIL") << '\t'
              << "mismatched_cells=" << mismatches.size() << '\t'
              << "published reference tables" << '\n';
    for (const CellMismatch& mismatch : mismatches) {
      std::cout << table.name << '.' << mismatch.algorithm << '.' << mismatch.cell
                << "\tFAIL\texpected=" << mismatch.expected
                << "\tobserved=" << mismatch.observed << '\n';
      ++failures;
    }
  }

  std::cout << (failures == 0 ? "validate: all checks passed"
                              : "validate: " + std::to_string(failures) +
                                    " check(s) failed")
            << '\n';
  return failures == 0 ? kExitSuccess : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online error-rate control procedures and platform-trial simulation"};
  app.require_subcommand(1);

  SimulateOptions simulate_options;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Run the Monte Carlo study and write a CSV table");
  simulate->add_option("--config", simulate_options.config_path,
                       "JSON study configuration (defaults to the full published grid)");
  simulate->add_option("--reps", simulate_options.reps,
                       "Override replications per scenario");
  simulate->add_option("--seed", simulate_options.seed, "Override the base seed");
  simulate->add_option("--out", simulate_options.output, "Override the output CSV path");
  simulate->add_option("--threads", simulate_options.threads,
                       "Worker threads (overrides ONLINETRIAL_THREADS)");

  CaseStudyOptions case_options;
  CLI::App* case_study =
      app.add_subcommand("case-study", "Replay a platform trial through every algorithm");
  CLI::Option* order_option =
      case_study
          ->add_option("--order", case_options.order,
                       "Built-in arm ordering: default or swapped")
          ->check(CLI::IsMember({"default", "swapped"}));
  CLI::Option* input_option = case_study->add_option(
      "--input", case_options.input_path, "External case input (JSON)");
  order_option->excludes(input_option);
  case_study->add_option("--alpha", case_options.alphas,
                         "Target levels (repeatable; default 0.025 0.05 0.1)");
  case_study->add_option("--n-bound", case_options.n_bound,
                         "Override the hypothesis horizon");
  case_study->add_option("--algorithms", case_options.algorithms,
                         "Restrict to these algorithms (roster labels)");

  CLI::App* validate = app.add_subcommand(
      "validate", "Run the field checks and the published-table comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(simulate_options);
    if (case_study->parsed()) return cmd_case_study(case_options);
    if (validate->parsed()) return cmd_validate();
    std::cerr << "no subcommand given\n";
    return kExitUsage;
  } catch (const onlinetrial::ConfigError& error) {
    std::cerr << "error: " << error.what() << '\n';
    return kExitUsage;
  } catch (const onlinetrial::DomainError& error) {
    std::cerr << "error: " << error.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return kExitCheckFailure;
  }
}
