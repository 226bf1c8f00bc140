#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stochopt/config.hpp"
#include "stochopt/dataset.hpp"
#include "stochopt/metrics.hpp"
#include "stochopt/problems.hpp"

namespace stochopt {

struct LoadedProblem {
  std::shared_ptr<const Dataset> train;
  std::shared_ptr<const Dataset> test;  // may be null
  std::unique_ptr<FiniteSumProblem> problem;
  std::string dataset_hash;  // git blob hash of the training data bytes
  std::string problem_hash;  // dataset, held-out set, loss and lambda
};

// Reads or generates the data named by the config. File sources hash the
// file bytes; synthetic data hashes its LIBSVM serialization.
LoadedProblem load_problem(const ProblemConfig& config);

struct ExperimentOutcome {
  std::filesystem::path metrics_path;
  std::filesystem::path manifest_path;  // metrics path + ".manifest.json"
  RunResult run;
  std::string dataset_hash;
  std::string problem_hash;
  std::string config_hash;
  std::string run_hash;
};

// Validates, runs the selected algorithm, streams rows to config.output as
// CSV and writes the sidecar manifest. Nothing time-dependent goes into the
// manifest, so reruns reproduce it byte for byte.
ExperimentOutcome run_experiment(const ExperimentConfig& config);
ExperimentOutcome run_experiment(const ExperimentConfig& config, const LoadedProblem& loaded);

struct SummaryRow {
  std::string label;
  std::string algorithm;
  std::string problem_hash;
  std::optional<double> final_loss;
  std::optional<double> best_loss;
  std::optional<double> final_accuracy;
  std::size_t samples = 0;
  std::size_t iterations = 0;
  RunStatus status = RunStatus::completed;
  std::filesystem::path metrics_path;
};

SummaryRow summarize(const std::string& label, const ExperimentConfig& config,
                     const ExperimentOutcome& outcome);

// Runs every config (outputs redirected to out_dir/run<i>_<algorithm>.csv)
// and returns one row each, in input order. All configs must share a
// problem. Up to `threads` runs proceed at once; 0 means STOCHOPT_THREADS or,
// failing that, the hardware concurrency.
std::vector<SummaryRow> compare(const std::vector<ExperimentConfig>& configs,
                                const std::filesystem::path& out_dir, std::size_t threads = 0);

std::string format_summary(const std::vector<SummaryRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

// Parallelism for compare from STOCHOPT_THREADS (>= 1), else the fallback.
std::size_t thread_budget(std::size_t fallback);

}  // namespace stochopt
