#include "stochopt/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace stochopt {

namespace {

void check_shape(Eigen::Index rows, Eigen::Index cols, const Vec& labels) {
  if (rows < 1) throw std::invalid_argument("dataset must contain at least one sample");
  if (cols < 1) throw std::invalid_argument("dataset must have at least one feature");
  if (labels.size() != rows) {
    throw std::invalid_argument("label count does not match sample count");
  }
  if (!labels.allFinite()) throw std::invalid_argument("labels must be finite");
}

}  // namespace

Dataset::Dataset(std::variant<DenseRows, SparseRows> rows, Vec labels, std::size_t dim)
    : rows_(std::move(rows)), labels_(std::move(labels)), dim_(dim) {}

Dataset Dataset::from_dense(DenseRows features, Vec labels) {
  check_shape(features.rows(), features.cols(), labels);
  if (!features.allFinite()) throw std::invalid_argument("features must be finite");
  const auto dim = static_cast<std::size_t>(features.cols());
  if (dim > kDenseDimensionLimit) {
    SparseRows sparse = features.sparseView();
    sparse.makeCompressed();
    return Dataset(std::move(sparse), std::move(labels), dim);
  }
  return Dataset(std::move(features), std::move(labels), dim);
}

Dataset Dataset::from_sparse(SparseRows features, Vec labels) {
  check_shape(features.rows(), features.cols(), labels);
  features.makeCompressed();
  for (Eigen::Index k = 0; k < features.nonZeros(); ++k) {
    if (!std::isfinite(features.valuePtr()[k])) {
      throw std::invalid_argument("features must be finite");
    }
  }
  const auto dim = static_cast<std::size_t>(features.cols());
  if (dim <= kDenseDimensionLimit) {
    DenseRows dense = DenseRows(features);
    return Dataset(std::move(dense), std::move(labels), dim);
  }
  return Dataset(std::move(features), std::move(labels), dim);
}

double Dataset::dot_row(std::size_t i, const Vec& x) const {
  const auto r = static_cast<Eigen::Index>(i);
  if (const auto* dense = std::get_if<DenseRows>(&rows_)) return dense->row(r).dot(x);
  const auto& sparse = std::get<SparseRows>(rows_);
  double acc = 0.0;
  for (SparseRows::InnerIterator it(sparse, r); it; ++it) acc += it.value() * x[it.index()];
  return acc;
}

void Dataset::axpy_row(std::size_t i, double alpha, Vec& out) const {
  const auto r = static_cast<Eigen::Index>(i);
  if (const auto* dense = std::get_if<DenseRows>(&rows_)) {
    out.noalias() += alpha * dense->row(r).transpose();
    return;
  }
  const auto& sparse = std::get<SparseRows>(rows_);
  for (SparseRows::InnerIterator it(sparse, r); it; ++it) out[it.index()] += alpha * it.value();
}

double Dataset::row_squared_norm(std::size_t i) const {
  const auto r = static_cast<Eigen::Index>(i);
  if (const auto* dense = std::get_if<DenseRows>(&rows_)) return dense->row(r).squaredNorm();
  const auto& sparse = std::get<SparseRows>(rows_);
  double acc = 0.0;
  for (SparseRows::InnerIterator it(sparse, r); it; ++it) acc += it.value() * it.value();
  return acc;
}

double Dataset::max_row_squared_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < size(); ++i) best = std::max(best, row_squared_norm(i));
  return best;
}

std::vector<std::pair<std::size_t, double>> Dataset::row_entries(std::size_t i) const {
  std::vector<std::pair<std::size_t, double>> entries;
  const auto r = static_cast<Eigen::Index>(i);
  if (const auto* dense = std::get_if<DenseRows>(&rows_)) {
    for (Eigen::Index j = 0; j < dense->cols(); ++j) {
      const double v = (*dense)(r, j);
      if (v != 0.0) entries.emplace_back(static_cast<std::size_t>(j), v);
    }
    return entries;
  }
  const auto& sparse = std::get<SparseRows>(rows_);
  for (SparseRows::InnerIterator it(sparse, r); it; ++it) {
    entries.emplace_back(static_cast<std::size_t>(it.index()), it.value());
  }
  return entries;
}

DenseRows Dataset::to_dense() const {
  if (const auto* dense = std::get_if<DenseRows>(&rows_)) return *dense;
  return DenseRows(std::get<SparseRows>(rows_));
}

}  // namespace stochopt
