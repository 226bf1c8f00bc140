#pragma once

#include <cstddef>
#include <memory>
#include <string_view>

#include "stochopt/dataset.hpp"
#include "stochopt/types.hpp"

namespace stochopt {

enum class LossKind { logistic, sigmoid_svm, quadratic };

std::string_view to_string(LossKind kind);

// Finite-sum objective f(x) = (1/N) sum_i f_i(x).
//
// Subclasses supply per-sample values and gradients; the batch operations
// here are shared so that every estimator sums in the same order. Batches are
// reduced in ascending index order, which makes batch_grad over 0..N-1
// bit-identical to full_grad. Problems are immutable and safe to share
// across threads.
class FiniteSumProblem {
 public:
  virtual ~FiniteSumProblem() = default;

  virtual LossKind kind() const = 0;
  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;

  // Upper bound on the Lipschitz constant of the full gradient. Only used by
  // diagnostics and step-size schedules that ask for it explicitly.
  virtual double lipschitz_bound() const = 0;

  double loss_i(std::size_t i, const Vec& x) const;
  Vec grad_i(std::size_t i, const Vec& x) const;

  // Mean of per-sample losses/gradients over a nonempty index multiset.
  double batch_loss(BatchView batch, const Vec& x) const;
  Vec batch_grad(BatchView batch, const Vec& x) const;

  double full_loss(const Vec& x) const;
  Vec full_grad(const Vec& x) const;

  // Per-sample gradient without argument checks; for callers that already
  // validated x and i (variance estimation loops).
  void sample_grad_unchecked(std::size_t i, const Vec& x, Vec& out) const;

 protected:
  // f_i(x) excluding any term handled by add_shared_loss.
  virtual double sample_loss(std::size_t i, const Vec& x) const = 0;
  // out += scale * grad f_i(x) excluding the shared term.
  virtual void accumulate_sample_grad(std::size_t i, const Vec& x, double scale,
                                      Vec& out) const = 0;
  // Term present identically in every f_i (e.g. a ridge penalty).
  virtual double shared_loss(const Vec& /*x*/) const { return 0.0; }
  virtual void add_shared_grad(const Vec& /*x*/, Vec& /*out*/) const {}

 private:
  void check_point(const Vec& x) const;
  Batch sorted_checked(BatchView batch) const;
};

// Binary linear model: f_i(x) = phi(v_i u_i^T x) + lambda ||x||^2, with
// phi(z) = log(1 + exp(-z)) for logistic loss and 1 - tanh(z) for the
// sigmoid SVM loss. The ridge term is carried in full by every f_i.
class LinearModelProblem final : public FiniteSumProblem {
 public:
  LinearModelProblem(std::shared_ptr<const Dataset> data, double lambda, LossKind kind);

  LossKind kind() const override { return kind_; }
  std::size_t size() const override { return data_->size(); }
  std::size_t dim() const override { return data_->dim(); }

  // logistic: max||u||^2 / 4 + 2 lambda;
  // sigmoid SVM: 4 / (3 sqrt 3) * max||u||^2 + 2 lambda.
  double lipschitz_bound() const override;

  double lambda() const { return lambda_; }
  const Dataset& data() const { return *data_; }

 protected:
  double sample_loss(std::size_t i, const Vec& x) const override;
  void accumulate_sample_grad(std::size_t i, const Vec& x, double scale,
                              Vec& out) const override;
  double shared_loss(const Vec& x) const override;
  void add_shared_grad(const Vec& x, Vec& out) const override;

 private:
  std::shared_ptr<const Dataset> data_;
  double lambda_;
  LossKind kind_;
  double max_row_sq_;
};

LinearModelProblem make_logistic(std::shared_ptr<const Dataset> data, double lambda);
LinearModelProblem make_sigmoid_svm(std::shared_ptr<const Dataset> data, double lambda);

// How a quadratic is split into summands.
//   rank_one:  with A = R^T R (Cholesky), f_i(x) = n((r_i^T x)^2 / 2 - b_i x_i).
//              Every summand is convex and the batch gradient is noisy.
//   identical: f_i = f for all i (noise-free sampling).
// Both use N = n summands.
enum class QuadraticSplit { rank_one, identical };

// f(x) = x^T A x / 2 - b^T x with A symmetric positive definite.
class QuadraticProblem final : public FiniteSumProblem {
 public:
  QuadraticProblem(Mat a, Vec b, QuadraticSplit split);

  LossKind kind() const override { return LossKind::quadratic; }
  std::size_t size() const override { return static_cast<std::size_t>(b_.size()); }
  std::size_t dim() const override { return static_cast<std::size_t>(b_.size()); }
  // Exact: lambda_max(A).
  double lipschitz_bound() const override { return lipschitz_; }

  const Mat& hessian() const { return a_; }
  const Vec& linear_term() const { return b_; }
  Vec minimizer() const;
  double min_value() const;
  QuadraticSplit split() const { return split_; }

 protected:
  double sample_loss(std::size_t i, const Vec& x) const override;
  void accumulate_sample_grad(std::size_t i, const Vec& x, double scale,
                              Vec& out) const override;

 private:
  Mat a_;
  Vec b_;
  QuadraticSplit split_;
  Mat factor_rows_;  // row i is r_i^T
  double lipschitz_ = 0.0;
};

QuadraticProblem make_quadratic(Mat a, Vec b, QuadraticSplit split = QuadraticSplit::rank_one);

}  // namespace stochopt
