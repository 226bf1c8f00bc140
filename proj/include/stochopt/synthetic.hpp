#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stochopt/dataset.hpp"
#include "stochopt/types.hpp"

namespace stochopt {

// Planted binary classification data.
//
// Features u = D^{1/2} z with z ~ N(0, I) and D diagonal, log-spaced from
// 1/kappa to 1, so the population covariance has condition number kappa.
// A planted x* ~ N(0, I) gives the standardized score t = u^T x* / ||D^{1/2} x*||.
//   linear_separable:    v = sign(t + noise * e), e ~ N(0, 1)
//   sigmoid_svm_planted: P(v = +1) = (1 + tanh(t / noise)) / 2
// With noise = 0 both reduce to v = sign(t) (zero counts as +1).
enum class LabelModel { linear_separable, sigmoid_svm_planted };

std::string_view to_string(LabelModel model);
LabelModel parse_label_model(std::string_view name);

struct SyntheticSpec {
  std::size_t samples = 1000;  // N
  std::size_t features = 20;   // n
  double noise = 0.1;
  double kappa = 1.0;
  LabelModel labels = LabelModel::linear_separable;
  std::uint64_t seed = 0;

  std::vector<std::string> violations() const;
  void validate() const;
};

struct SyntheticData {
  Dataset data;
  Vec planted;
};

// Deterministic in the spec. `extra` more samples from the same planted
// model are drawn after the first N and returned as a held-out set.
SyntheticData generate_synthetic(const SyntheticSpec& spec);
std::pair<SyntheticData, std::optional<Dataset>> generate_synthetic_split(
    const SyntheticSpec& spec, std::size_t extra);

Dataset gen_synthetic(const SyntheticSpec& spec);

}  // namespace stochopt
