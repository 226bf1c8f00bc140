#pragma once

// Independent oracles and fixtures shared by the unit and acceptance tests.
// Nothing here calls into the code under test for the quantity it checks.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "stochopt/dataset.hpp"
#include "stochopt/lbfgs.hpp"
#include "stochopt/problems.hpp"
#include "stochopt/rng.hpp"
#include "stochopt/types.hpp"

namespace testing {

using stochopt::Batch;
using stochopt::Mat;
using stochopt::SplitMix64;
using stochopt::Vec;

inline Vec random_vec(SplitMix64& rng, Eigen::Index n, double scale = 1.0) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

inline double uniform(SplitMix64& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline Mat random_orthogonal(SplitMix64& rng, Eigen::Index n) {
  Mat g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(g);
  return qr.householderQ() * Mat::Identity(n, n);
}

// SPD matrix with eigenvalues log-spaced in [lo, hi].
inline Mat random_spd(SplitMix64& rng, Eigen::Index n, double lo, double hi) {
  const Mat q = random_orthogonal(rng, n);
  Vec d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    d[i] = lo * std::pow(hi / lo, t);
  }
  Mat a = q * d.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

inline std::shared_ptr<const stochopt::Dataset> random_dataset(SplitMix64& rng, std::size_t n_samples,
                                                               std::size_t dim) {
  stochopt::DenseRows u(static_cast<Eigen::Index>(n_samples), static_cast<Eigen::Index>(dim));
  Vec v(static_cast<Eigen::Index>(n_samples));
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) u(i, j) = rng.normal();
    v[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  return std::make_shared<const stochopt::Dataset>(stochopt::Dataset::from_dense(u, v));
}

// Central differences, h = 1e-5 by default.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-5) {
  Vec g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline Vec eigenvalues(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Floating-point slack for comparing computed eigenvalues against analytic
// enclosures: a small multiple of the unit round-off times the spectrum scale.
inline double eig_slack(const Vec& eig) {
  return 64.0 * std::numeric_limits<double>::epsilon() * eig.cwiseAbs().maxCoeff();
}

// Dense inverse-Hessian approximation from the stored damped pairs,
// H <- V H V^T + rho s s^T with V = I - rho s yhat^T, oldest pair first,
// starting from H0 = I / scaling.
inline Mat dense_inverse_hessian(const stochopt::LbfgsMemory& memory) {
  const auto n = memory.pairs().empty() ? Eigen::Index{0} : memory.pairs().front().s.size();
  Mat h = Mat::Identity(n, n) / memory.scaling();
  for (const auto& p : memory.pairs()) {
    const double rho = 1.0 / p.s.dot(p.y_hat);
    const Mat v = Mat::Identity(n, n) - rho * p.s * p.y_hat.transpose();
    h = v * h * v.transpose() + rho * p.s * p.s.transpose();
  }
  return h;
}

inline Mat dense_inverse_hessian(const stochopt::LbfgsMemory& memory, Eigen::Index n) {
  if (memory.empty()) return Mat::Identity(n, n) / memory.scaling();
  return dense_inverse_hessian(memory);
}

// A memory filled with `pairs` random curvature pairs in dimension n. The
// raw y is a random mix of a curvature term and noise so that damping and
// both scaling-clamp branches get exercised.
inline stochopt::LbfgsMemory random_memory(SplitMix64& rng, Eigen::Index n, std::size_t capacity,
                                           std::size_t pairs, double eta = 0.25) {
  stochopt::LbfgsConfig cfg;
  cfg.memory = capacity;
  cfg.eta = eta;
  cfg.gamma_under = 0.1;
  cfg.gamma_over = 1e3;
  stochopt::LbfgsMemory memory(cfg);
  const Mat a = random_spd(rng, n, 0.2, 20.0);
  for (std::size_t k = 0; k < pairs; ++k) {
    const Vec s = random_vec(rng, n, uniform(rng, 0.1, 2.0));
    Vec y = a * s;
    if (rng.uniform() < 0.5) y += random_vec(rng, n, uniform(rng, 0.0, 3.0) * s.norm());
    memory.push(s, y);
  }
  return memory;
}

// f_i(x) = a_i ||x - c_i||^2 / 2 with sum_i a_i c_i = 0, so grad f(0) = 0
// while per-sample gradients at 0 are zero-mean noise.
class PureNoiseProblem final : public stochopt::FiniteSumProblem {
 public:
  PureNoiseProblem(SplitMix64& rng, std::size_t n_samples, std::size_t dim)
      : a_(static_cast<Eigen::Index>(n_samples)),
        c_(static_cast<Eigen::Index>(n_samples), static_cast<Eigen::Index>(dim)) {
    for (Eigen::Index i = 0; i < a_.size(); ++i) {
      a_[i] = uniform(rng, 0.5, 1.5);
      for (Eigen::Index j = 0; j < c_.cols(); ++j) c_(i, j) = rng.normal();
    }
    const Vec weighted_mean = (c_.transpose() * a_) / a_.sum();
    c_.rowwise() -= weighted_mean.transpose();
  }

  stochopt::LossKind kind() const override { return stochopt::LossKind::quadratic; }
  std::size_t size() const override { return static_cast<std::size_t>(a_.size()); }
  std::size_t dim() const override { return static_cast<std::size_t>(c_.cols()); }
  double lipschitz_bound() const override { return a_.mean(); }

 protected:
  double sample_loss(std::size_t i, const Vec& x) const override {
    const auto r = static_cast<Eigen::Index>(i);
    return 0.5 * a_[r] * (x - c_.row(r).transpose()).squaredNorm();
  }
  void accumulate_sample_grad(std::size_t i, const Vec& x, double scale, Vec& out) const override {
    const auto r = static_cast<Eigen::Index>(i);
    out += (scale * a_[r]) * (x - c_.row(r).transpose());
  }

 private:
  Vec a_;
  Mat c_;
};

// Least squares f_i(x) = (u_i^T x - v_i)^2 / 2 + mu ||x||^2 / 2, any N.
class LeastSquaresProblem final : public stochopt::FiniteSumProblem {
 public:
  LeastSquaresProblem(Mat u, Vec v, double mu) : u_(std::move(u)), v_(std::move(v)), mu_(mu) {}

  stochopt::LossKind kind() const override { return stochopt::LossKind::quadratic; }
  std::size_t size() const override { return static_cast<std::size_t>(v_.size()); }
  std::size_t dim() const override { return static_cast<std::size_t>(u_.cols()); }
  double lipschitz_bound() const override { return eigenvalues(hessian()).maxCoeff(); }

  Mat hessian() const {
    return u_.transpose() * u_ / static_cast<double>(v_.size()) +
           mu_ * Mat::Identity(u_.cols(), u_.cols());
  }
  Vec minimizer() const {
    return hessian().ldlt().solve(u_.transpose() * v_ / static_cast<double>(v_.size()));
  }

 protected:
  double sample_loss(std::size_t i, const Vec& x) const override {
    const auto r = static_cast<Eigen::Index>(i);
    const double e = u_.row(r).dot(x) - v_[r];
    return 0.5 * e * e;
  }
  void accumulate_sample_grad(std::size_t i, const Vec& x, double scale, Vec& out) const override {
    const auto r = static_cast<Eigen::Index>(i);
    out += (scale * (u_.row(r).dot(x) - v_[r])) * u_.row(r).transpose();
  }
  double shared_loss(const Vec& x) const override { return 0.5 * mu_ * x.squaredNorm(); }
  void add_shared_grad(const Vec& x, Vec& out) const override { out += mu_ * x; }

 private:
  Mat u_;
  Vec v_;
  double mu_;
};

// Every m-subset of {0, ..., n-1} in lexicographic order.
inline std::vector<Batch> all_subsets(std::size_t n, std::size_t m) {
  std::vector<Batch> out;
  Batch cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == m) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

// Mean of per-sample gradients by direct summation of grad_i.
inline Vec direct_mean_grad(const stochopt::FiniteSumProblem& p, const Batch& batch, const Vec& x) {
  Vec g = Vec::Zero(x.size());
  for (auto i : batch) g += p.grad_i(i, x);
  return g / static_cast<double>(batch.size());
}

}  // namespace testing
