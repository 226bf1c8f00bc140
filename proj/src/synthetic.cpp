#include "stochopt/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "stochopt/errors.hpp"
#include "stochopt/rng.hpp"

namespace stochopt {

std::string_view to_string(LabelModel model) {
  return model == LabelModel::linear_separable ? "linear_separable" : "sigmoid_svm_planted";
}

LabelModel parse_label_model(std::string_view name) {
  if (name == "linear_separable") return LabelModel::linear_separable;
  if (name == "sigmoid_svm_planted") return LabelModel::sigmoid_svm_planted;
  throw std::invalid_argument("unknown label model '" + std::string(name) +
                              "' (valid: linear_separable, sigmoid_svm_planted)");
}

std::vector<std::string> SyntheticSpec::violations() const {
  std::vector<std::string> out;
  if (samples < 2) out.push_back("synthetic samples must be >= 2");
  if (features < 1) out.push_back("synthetic features must be >= 1");
  if (!(std::isfinite(noise) && noise >= 0.0)) out.push_back("synthetic noise must be finite and >= 0");
  if (!(std::isfinite(kappa) && kappa >= 1.0)) out.push_back("synthetic kappa must be finite and >= 1");
  return out;
}

void SyntheticSpec::validate() const { throw_if_invalid(violations()); }

namespace {

Dataset draw_rows(const SyntheticSpec& spec, std::size_t count, const Vec& scale,
                  const Vec& planted, double score_norm, SplitMix64& rng) {
  const auto n = static_cast<Eigen::Index>(spec.features);
  DenseRows u(static_cast<Eigen::Index>(count), n);
  Vec v(static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < n; ++j) u(i, j) = scale[j] * rng.normal();
    const double t = u.row(i).dot(planted) / score_norm;
    double label = 1.0;
    if (spec.noise == 0.0) {
      label = t >= 0.0 ? 1.0 : -1.0;
    } else if (spec.labels == LabelModel::linear_separable) {
      label = t + spec.noise * rng.normal() >= 0.0 ? 1.0 : -1.0;
    } else {
      const double p = 0.5 * (1.0 + std::tanh(t / spec.noise));
      label = rng.uniform() < p ? 1.0 : -1.0;
    }
    v[i] = label;
  }
  return Dataset::from_dense(std::move(u), std::move(v));
}

}  // namespace

std::pair<SyntheticData, std::optional<Dataset>> generate_synthetic_split(
    const SyntheticSpec& spec, std::size_t extra) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  const auto n = static_cast<Eigen::Index>(spec.features);
  Vec scale(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double frac = n == 1 ? 1.0 : static_cast<double>(j) / static_cast<double>(n - 1);
    scale[j] = std::sqrt(std::pow(spec.kappa, frac - 1.0));
  }
  Vec planted(n);
  for (Eigen::Index j = 0; j < n; ++j) planted[j] = rng.normal();
  double score_norm = scale.cwiseProduct(planted).norm();
  if (score_norm == 0.0) score_norm = 1.0;

  Dataset train = draw_rows(spec, spec.samples, scale, planted, score_norm, rng);
  std::optional<Dataset> test;
  if (extra > 0) test = draw_rows(spec, extra, scale, planted, score_norm, rng);
  return {SyntheticData{std::move(train), std::move(planted)}, std::move(test)};
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  return generate_synthetic_split(spec, 0).first;
}

Dataset gen_synthetic(const SyntheticSpec& spec) { return generate_synthetic(spec).data; }

}  // namespace stochopt
