#include <doctest.h>

#include <cmath>

#include "stochopt/problems.hpp"
#include "../support.hpp"

using namespace stochopt;
using namespace testing;

namespace {

std::shared_ptr<const Dataset> one_sample(Vec u, double v) {
  DenseRows rows = u.transpose();
  return std::make_shared<const Dataset>(Dataset::from_dense(rows, Vec::Constant(1, v)));
}

double rel_err(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(1.0, a.norm()); }

}  // namespace

TEST_CASE("sigmoid SVM at the origin") {
  const Vec u = (Vec(3) << 1.0, -2.0, 0.5).finished();
  for (double v : {-1.0, 1.0}) {
    auto p = make_sigmoid_svm(one_sample(u, v), 0.0);
    const Vec x = Vec::Zero(3);
    CHECK(p.loss_i(0, x) == doctest::Approx(1.0));
    CHECK(rel_err(p.grad_i(0, x), -v * u) < 1e-15);
  }
}

TEST_CASE("logistic at the origin") {
  const Vec u = (Vec(2) << 3.0, -1.0).finished();
  for (double v : {-1.0, 1.0}) {
    auto p = make_logistic(one_sample(u, v), 0.0);
    const Vec x = Vec::Zero(2);
    CHECK(p.loss_i(0, x) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(rel_err(p.grad_i(0, x), -0.5 * v * u) < 1e-15);
  }
}

TEST_CASE("quadratic with A = I, b = 0 evaluates to half the squared norm") {
  auto p = make_quadratic(Mat::Identity(2, 2), Vec::Zero(2), QuadraticSplit::identical);
  const Vec x = (Vec(2) << 3.0, 4.0).finished();
  CHECK(p.loss_i(0, x) == doctest::Approx(12.5));
  CHECK(p.full_loss(x) == doctest::Approx(12.5));
  CHECK(rel_err(p.full_grad(x), x) < 1e-15);
  auto r = make_quadratic(Mat::Identity(2, 2), Vec::Zero(2));
  CHECK(r.full_loss(x) == doctest::Approx(12.5));
  CHECK(rel_err(r.full_grad(x), x) < 1e-15);
}

TEST_CASE("quadratic minimizers") {
  auto p = make_quadratic(Mat::Identity(3, 3), Vec::Zero(3));
  CHECK(p.minimizer().norm() == 0.0);
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 10.0;
  auto q = make_quadratic(a, (Vec(2) << 1.0, 10.0).finished());
  CHECK(rel_err(q.minimizer(), Vec::Ones(2)) < 1e-14);
  CHECK(q.full_grad(Vec::Ones(2)).norm() < 1e-13);
  CHECK(q.lipschitz_bound() == doctest::Approx(10.0));
}

TEST_CASE("quadratic rejects non-SPD input") {
  Mat a = Mat::Identity(2, 2);
  a(1, 1) = -1.0;
  CHECK_THROWS_AS(make_quadratic(a, Vec::Zero(2)), std::invalid_argument);
  Mat b = Mat::Identity(2, 2);
  b(0, 1) = 0.5;
  CHECK_THROWS_AS(make_quadratic(b, Vec::Zero(2)), std::invalid_argument);
}

TEST_CASE("analytic gradients match central differences") {
  SplitMix64 rng(11);
  auto data = random_dataset(rng, 20, 6);
  auto logistic = make_logistic(data, 0.01);
  auto svm = make_sigmoid_svm(data, 0.01);
  auto quad = make_quadratic(random_spd(rng, 6, 0.5, 5.0), random_vec(rng, 6));
  for (const FiniteSumProblem* p : std::initializer_list<const FiniteSumProblem*>{&logistic, &svm, &quad}) {
    CAPTURE(to_string(p->kind()));
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t i = rng.below(p->size());
      const Vec x = random_vec(rng, static_cast<Eigen::Index>(p->dim()));
      const Vec fd = fd_gradient([&](const Vec& z) { return p->loss_i(i, z); }, x);
      CHECK(rel_err(p->grad_i(i, x), fd) <= 1e-6);
    }
  }
}

TEST_CASE("batch operations") {
  SplitMix64 rng(5);
  auto data = random_dataset(rng, 7, 4);
  auto p = make_logistic(data, 0.1);
  const Vec x = random_vec(rng, 4);
  Batch all(7);
  for (std::size_t i = 0; i < 7; ++i) all[i] = i;

  SUBCASE("full index set is bit-identical to the full gradient") {
    CHECK(p.batch_grad(all, x) == p.full_grad(x));
    CHECK(p.batch_loss(all, x) == p.full_loss(x));
    Batch reversed(all.rbegin(), all.rend());
    CHECK(p.batch_grad(reversed, x) == p.full_grad(x));
  }
  SUBCASE("singleton batch equals the per-sample oracle") {
    CHECK(p.batch_grad(Batch{3}, x) == p.grad_i(3, x));
    CHECK(p.batch_loss(Batch{3}, x) == p.loss_i(3, x));
  }
  SUBCASE("batch loss is the mean of per-sample losses") {
    const Batch b{0, 2, 5, 6};
    double sum = 0.0;
    for (auto i : b) sum += p.loss_i(i, x);
    CHECK(p.batch_loss(b, x) == doctest::Approx(sum / 4.0).epsilon(1e-14));
    CHECK(rel_err(p.batch_grad(b, x), direct_mean_grad(p, b, x)) < 1e-14);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(p.batch_grad(Batch{}, x), std::invalid_argument);
    CHECK_THROWS_AS(p.batch_loss(Batch{}, x), std::invalid_argument);
    CHECK_THROWS_AS(p.loss_i(7, x), std::out_of_range);
    CHECK_THROWS_AS(p.grad_i(0, Vec::Zero(3)), std::invalid_argument);
    Vec bad = x;
    bad[1] = std::nan("");
    CHECK_THROWS_AS(p.loss_i(0, bad), std::domain_error);
    bad[1] = INFINITY;
    CHECK_THROWS_AS(p.full_grad(bad), std::domain_error);
  }
}

TEST_CASE("mean of batch gradients over all subsets equals the full gradient") {
  SplitMix64 rng(17);
  for (std::size_t n_samples : {3u, 5u, 6u}) {
    auto p = make_sigmoid_svm(random_dataset(rng, n_samples, 3), 0.05);
    const Vec x = random_vec(rng, 3);
    const Vec full = p.full_grad(x);
    for (std::size_t m = 1; m <= n_samples; ++m) {
      const auto subsets = all_subsets(n_samples, m);
      Vec mean = Vec::Zero(3);
      for (const auto& b : subsets) mean += p.batch_grad(b, x);
      mean /= static_cast<double>(subsets.size());
      CHECK((mean - full).norm() <= 1e-12);
    }
  }
}

TEST_CASE("full gradient vanishes on mirrored data at the origin") {
  DenseRows u(4, 2);
  u << 1, 2, -1, -2, 0.5, -3, -0.5, 3;
  const Vec v = (Vec(4) << 1, 1, -1, -1).finished();
  auto data = std::make_shared<const Dataset>(Dataset::from_dense(u, v));
  auto p = make_logistic(data, 0.3);
  CHECK(p.full_grad(Vec::Zero(2)).norm() == 0.0);
}

TEST_CASE("labels must be +-1 for binary losses") {
  DenseRows u(2, 1);
  u << 1, 2;
  auto data = std::make_shared<const Dataset>(Dataset::from_dense(u, (Vec(2) << 1, 0).finished()));
  CHECK_THROWS_AS(make_logistic(data, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_sigmoid_svm(data, 0.0), std::invalid_argument);
}

TEST_CASE("ridge term is carried by every sample") {
  SplitMix64 rng(2);
  auto data = random_dataset(rng, 5, 3);
  auto p0 = make_logistic(data, 0.0);
  auto p1 = make_logistic(data, 0.5);
  const Vec x = random_vec(rng, 3);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(p1.loss_i(i, x) - p0.loss_i(i, x) == doctest::Approx(0.5 * x.squaredNorm()));
    CHECK(rel_err(p1.grad_i(i, x) - p0.grad_i(i, x), x) < 1e-14);
  }
}

TEST_CASE("Lipschitz bounds dominate sampled Hessian norms") {
  SplitMix64 rng(8);
  auto data = random_dataset(rng, 30, 4);
  for (auto kind : {LossKind::logistic, LossKind::sigmoid_svm}) {
    LinearModelProblem p(data, 0.1, kind);
    for (int t = 0; t < 20; ++t) {
      const Vec x = random_vec(rng, 4, 2.0);
      const Vec d = random_vec(rng, 4);
      const double h = 1e-5;
      const double curv = ((p.full_grad(x + h * d) - p.full_grad(x - h * d)) / (2 * h)).norm() / d.norm();
      CHECK(curv <= p.lipschitz_bound() * (1 + 1e-6));
    }
  }
}

TEST_CASE("sparse and dense storage give the same problem") {
  SplitMix64 rng(21);
  const std::size_t dim = 600;
  SparseRows s(5, dim);
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 8; ++k) trip.emplace_back(i, static_cast<int>(rng.below(dim)), rng.normal());
  s.setFromTriplets(trip.begin(), trip.end());
  const Vec v = (Vec(5) << 1, -1, 1, 1, -1).finished();
  auto sparse = std::make_shared<const Dataset>(Dataset::from_sparse(s, v));
  REQUIRE(sparse->is_sparse());
  const Vec x = random_vec(rng, dim);
  auto ps = make_logistic(sparse, 0.01);
  for (std::size_t i = 0; i < 5; ++i) {
    const Vec u = sparse->to_dense().row(static_cast<Eigen::Index>(i)).transpose();
    const double z = v[static_cast<Eigen::Index>(i)] * u.dot(x);
    CHECK(ps.loss_i(i, x) == doctest::Approx(std::log1p(std::exp(-z)) + 0.01 * x.squaredNorm()));
  }
}
