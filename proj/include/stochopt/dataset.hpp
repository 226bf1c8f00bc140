#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Sparse>

#include "stochopt/types.hpp"

namespace stochopt {

using DenseRows = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Feature rows u_i plus scalar labels v_i.
//
// Rows are held either densely or as compressed sparse rows with indices
// sorted ascending. Datasets of dimension at most kDenseDimensionLimit are
// densified on construction; wider ones stay sparse. The object is immutable
// once built.
class Dataset {
 public:
  static constexpr std::size_t kDenseDimensionLimit = 512;

  static Dataset from_dense(DenseRows features, Vec labels);
  static Dataset from_sparse(SparseRows features, Vec labels);

  std::size_t size() const { return static_cast<std::size_t>(labels_.size()); }
  std::size_t dim() const { return dim_; }
  bool is_sparse() const { return std::holds_alternative<SparseRows>(rows_); }

  const Vec& labels() const { return labels_; }
  double label(std::size_t i) const { return labels_[static_cast<Eigen::Index>(i)]; }

  double dot_row(std::size_t i, const Vec& x) const;
  // out += alpha * u_i
  void axpy_row(std::size_t i, double alpha, Vec& out) const;
  double row_squared_norm(std::size_t i) const;
  double max_row_squared_norm() const;

  // Nonzero (index, value) pairs of row i in ascending index order.
  std::vector<std::pair<std::size_t, double>> row_entries(std::size_t i) const;

  DenseRows to_dense() const;

 private:
  Dataset(std::variant<DenseRows, SparseRows> rows, Vec labels, std::size_t dim);

  std::variant<DenseRows, SparseRows> rows_;
  Vec labels_;
  std::size_t dim_ = 0;
};

}  // namespace stochopt
