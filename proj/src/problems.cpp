#include "stochopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace stochopt {

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::logistic: return "logistic";
    case LossKind::sigmoid_svm: return "sigmoid-svm";
    case LossKind::quadratic: return "quadratic";
  }
  return "unknown";
}

void FiniteSumProblem::check_point(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                ", problem has " + std::to_string(dim()));
  }
  if (!x.allFinite()) throw std::domain_error("point contains non-finite entries");
}

Batch FiniteSumProblem::sorted_checked(BatchView batch) const {
  if (batch.empty()) throw std::invalid_argument("batch must be nonempty");
  Batch sorted(batch.begin(), batch.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.back() >= size()) {
    throw std::out_of_range("sample index " + std::to_string(sorted.back()) +
                            " out of range for N = " + std::to_string(size()));
  }
  return sorted;
}

double FiniteSumProblem::loss_i(std::size_t i, const Vec& x) const {
  const std::size_t one[] = {i};
  return batch_loss(one, x);
}

Vec FiniteSumProblem::grad_i(std::size_t i, const Vec& x) const {
  const std::size_t one[] = {i};
  return batch_grad(one, x);
}

double FiniteSumProblem::batch_loss(BatchView batch, const Vec& x) const {
  check_point(x);
  const Batch sorted = sorted_checked(batch);
  double acc = 0.0;
  for (std::size_t i : sorted) acc += sample_loss(i, x);
  return acc / static_cast<double>(sorted.size()) + shared_loss(x);
}

Vec FiniteSumProblem::batch_grad(BatchView batch, const Vec& x) const {
  check_point(x);
  const Batch sorted = sorted_checked(batch);
  Vec out = Vec::Zero(x.size());
  for (std::size_t i : sorted) accumulate_sample_grad(i, x, 1.0, out);
  out /= static_cast<double>(sorted.size());
  add_shared_grad(x, out);
  return out;
}

double FiniteSumProblem::full_loss(const Vec& x) const {
  Batch all(size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return batch_loss(all, x);
}

Vec FiniteSumProblem::full_grad(const Vec& x) const {
  Batch all(size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return batch_grad(all, x);
}

void FiniteSumProblem::sample_grad_unchecked(std::size_t i, const Vec& x, Vec& out) const {
  out.setZero(x.size());
  accumulate_sample_grad(i, x, 1.0, out);
  add_shared_grad(x, out);
}

// ---------------------------------------------------------------------------

namespace {

double softplus_neg(double z) {
  // log(1 + exp(-z))
  return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double softplus_neg_derivative(double z) {
  // d/dz log(1 + exp(-z)) = -1 / (1 + exp(z))
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(z));
}

void check_binary_labels(const Dataset& data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = data.label(i);
    if (v != 1.0 && v != -1.0) {
      throw std::invalid_argument("label of sample " + std::to_string(i) +
                                  " is not in {-1, +1}");
    }
  }
}

}  // namespace

LinearModelProblem::LinearModelProblem(std::shared_ptr<const Dataset> data, double lambda,
                                       LossKind kind)
    : data_(std::move(data)), lambda_(lambda), kind_(kind) {
  if (!data_) throw std::invalid_argument("dataset is null");
  if (kind_ == LossKind::quadratic) {
    throw std::invalid_argument("quadratic problems are built with make_quadratic");
  }
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw std::invalid_argument("regularizer lambda must be finite and nonnegative");
  }
  check_binary_labels(*data_);
  max_row_sq_ = data_->max_row_squared_norm();
}

double LinearModelProblem::lipschitz_bound() const {
  const double curvature =
      kind_ == LossKind::logistic ? 0.25 : 4.0 / (3.0 * std::sqrt(3.0));
  return curvature * max_row_sq_ + 2.0 * lambda_;
}

double LinearModelProblem::sample_loss(std::size_t i, const Vec& x) const {
  const double z = data_->label(i) * data_->dot_row(i, x);
  return kind_ == LossKind::logistic ? softplus_neg(z) : 1.0 - std::tanh(z);
}

void LinearModelProblem::accumulate_sample_grad(std::size_t i, const Vec& x, double scale,
                                                Vec& out) const {
  const double v = data_->label(i);
  const double z = v * data_->dot_row(i, x);
  double dphi;
  if (kind_ == LossKind::logistic) {
    dphi = softplus_neg_derivative(z);
  } else {
    const double t = std::tanh(z);
    dphi = -(1.0 - t * t);
  }
  data_->axpy_row(i, scale * v * dphi, out);
}

double LinearModelProblem::shared_loss(const Vec& x) const {
  return lambda_ * x.squaredNorm();
}

void LinearModelProblem::add_shared_grad(const Vec& x, Vec& out) const {
  if (lambda_ != 0.0) out.noalias() += (2.0 * lambda_) * x;
}

LinearModelProblem make_logistic(std::shared_ptr<const Dataset> data, double lambda) {
  return LinearModelProblem(std::move(data), lambda, LossKind::logistic);
}

LinearModelProblem make_sigmoid_svm(std::shared_ptr<const Dataset> data, double lambda) {
  return LinearModelProblem(std::move(data), lambda, LossKind::sigmoid_svm);
}

// ---------------------------------------------------------------------------

QuadraticProblem::QuadraticProblem(Mat a, Vec b, QuadraticSplit split)
    : a_(std::move(a)), b_(std::move(b)), split_(split) {
  const Eigen::Index n = a_.rows();
  if (n < 1 || a_.cols() != n) throw std::invalid_argument("A must be square and nonempty");
  if (b_.size() != n) throw std::invalid_argument("b must match the dimension of A");
  if (!a_.allFinite() || !b_.allFinite()) throw std::invalid_argument("A and b must be finite");
  const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("A must be symmetric");
  }
  Eigen::LLT<Mat> llt(a_);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("A must be positive definite");
  factor_rows_ = llt.matrixL().transpose();
  Eigen::SelfAdjointEigenSolver<Mat> eig(a_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("A must be positive definite");
  }
  lipschitz_ = eig.eigenvalues().maxCoeff();
}

Vec QuadraticProblem::minimizer() const { return a_.llt().solve(b_); }

double QuadraticProblem::min_value() const {
  const Vec xs = minimizer();
  return 0.5 * xs.dot(a_ * xs) - b_.dot(xs);
}

double QuadraticProblem::sample_loss(std::size_t i, const Vec& x) const {
  if (split_ == QuadraticSplit::identical) return 0.5 * x.dot(a_ * x) - b_.dot(x);
  const auto r = static_cast<Eigen::Index>(i);
  const double n = static_cast<double>(b_.size());
  const double proj = factor_rows_.row(r).dot(x);
  return n * (0.5 * proj * proj - b_[r] * x[r]);
}

void QuadraticProblem::accumulate_sample_grad(std::size_t i, const Vec& x, double scale,
                                              Vec& out) const {
  if (split_ == QuadraticSplit::identical) {
    out.noalias() += scale * (a_ * x - b_);
    return;
  }
  const auto r = static_cast<Eigen::Index>(i);
  const double n = static_cast<double>(b_.size());
  const double proj = factor_rows_.row(r).dot(x);
  out.noalias() += (scale * n * proj) * factor_rows_.row(r).transpose();
  out[r] -= scale * n * b_[r];
}

QuadraticProblem make_quadratic(Mat a, Vec b, QuadraticSplit split) {
  return QuadraticProblem(std::move(a), std::move(b), split);
}

}  // namespace stochopt
