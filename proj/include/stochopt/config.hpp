#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stochopt/aras.hpp"
#include "stochopt/baselines.hpp"
#include "stochopt/problems.hpp"
#include "stochopt/regularization.hpp"
#include "stochopt/synthetic.hpp"
#include "stochopt/varchen.hpp"

namespace stochopt {

// Experiment description read from an INI file. The schema (sections, keys,
// types, defaults) is documented in README.md; unknown sections or keys are
// errors.

enum class DataSource { synthetic, libsvm, csv };
std::string_view to_string(DataSource source);

struct ProblemConfig {
  LossKind kind = LossKind::logistic;
  double lambda = 1e-3;
  DataSource source = DataSource::synthetic;
  std::filesystem::path path;
  std::optional<std::size_t> dim;  // libsvm only
  std::size_t label_column = 0;    // csv only
  bool has_header = false;         // csv only
  std::optional<std::filesystem::path> test_path;
  SyntheticSpec synthetic;
  std::size_t synthetic_test_samples = 0;
};

struct ExperimentConfig {
  ProblemConfig problem;
  std::string algorithm = "aras";

  RegParams arig;
  OracleMode arig_oracle = OracleMode::exact;
  ArasParams aras;
  VarchenParams varchen;
  BaselineParams baseline;  // for sgd, momentum and svrg

  std::uint64_t seed = 0;
  std::filesystem::path output = "metrics.csv";
  std::size_t cadence = 0;

  // Every invariant violation of the problem block and of the selected
  // algorithm's parameters.
  std::vector<std::string> violations() const;
  void validate() const;
};

inline constexpr std::string_view kAlgorithms[] = {"arig",  "aras",     "varchen",
                                                   "sgd",   "momentum", "svrg"};
std::string algorithm_list();

// Relative data paths are resolved against `base_dir`. Throws ValidationError
// with every problem found: syntax, unknown keys, bad values, invariants.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Effective configuration (defaults filled in) as INI text, only the
// sections that matter for the selected algorithm. Stable across runs.
std::string canonical_config(const ExperimentConfig& config);

}  // namespace stochopt
