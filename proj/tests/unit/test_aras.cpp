#include <doctest.h>

#include <cmath>

#include "stochopt/aras.hpp"
#include "stochopt/errors.hpp"
#include "../support.hpp"

using namespace stochopt;
using namespace testing;

namespace {

QuadraticProblem half_norm(Eigen::Index n) {
  return make_quadratic(Mat::Identity(n, n), Vec::Zero(n), QuadraticSplit::identical);
}

ArasParams full_batch_params(std::size_t n) {
  ArasParams p;
  p.m0 = n;
  p.m_max = n;
  return p;
}

}  // namespace

TEST_CASE("pflug update and trigger") {
  PflugState s;
  const Vec e1 = (Vec(2) << 1.0, 0.0).finished();
  const Vec e2 = (Vec(2) << 0.0, 1.0).finished();
  pflug_update(s, e1, e1);
  CHECK(s.sum == 1.0);
  CHECK(s.steps == 1);
  PflugState t;
  pflug_update(t, -e1, e1);
  CHECK(t.sum == -1.0);
  pflug_update(t, e2, e1);
  CHECK(t.sum == -1.0);
  CHECK(t.prev_grad == e2);
  CHECK_THROWS_AS(pflug_update(t, Vec::Zero(3), e1), std::invalid_argument);

  PflugState gate;
  gate.burn_in = 5;
  gate.steps = 1;
  gate.sum = -3.0;
  CHECK_FALSE(pflug_triggered(gate));
  gate.steps = 6;
  gate.sum = -0.5;
  CHECK(pflug_triggered(gate));
  gate.sum = 0.0;
  CHECK_FALSE(pflug_triggered(gate));
  gate.steps = 5;
  gate.sum = -1.0;
  CHECK_FALSE(pflug_triggered(gate));
}

TEST_CASE("two-branch sigma update") {
  CHECK(update_sigma_two_branch(1.0, 0.5, 0.25, 0.5, 2.0, 0.1) == 0.5);
  CHECK(update_sigma_two_branch(1.0, 0.1, 0.25, 0.5, 2.0, 0.1) == 2.0);
  CHECK(update_sigma_two_branch(0.15, 0.9, 0.25, 0.5, 2.0, 0.1) == 0.1);
  CHECK(update_sigma_two_branch(1.0, 0.25, 0.25, 0.5, 2.0, 0.1) == 0.5);
}

TEST_CASE("parameter validation") {
  CHECK(ArasParams{}.violations().empty());
  auto bad = [](auto mutate) {
    ArasParams p;
    mutate(p);
    return !p.violations().empty();
  };
  CHECK(bad([](ArasParams& p) { p.sigma_min = 0.0; }));
  CHECK(bad([](ArasParams& p) { p.sigma0 = 1e-4; }));
  CHECK(bad([](ArasParams& p) { p.eta = 1.0; }));
  CHECK(bad([](ArasParams& p) { p.gamma1 = 1.0; }));
  CHECK(bad([](ArasParams& p) { p.gamma2 = 1.0; }));
  CHECK(bad([](ArasParams& p) { p.m0 = 0; }));
  CHECK(bad([](ArasParams& p) { p.m0 = 600; }));
  CHECK(bad([](ArasParams& p) { p.burn_in = 0; }));
  CHECK(bad([](ArasParams& p) { p.epochs = 0; }));
  auto q = half_norm(3);
  CHECK_THROWS_AS(make_aras_state(q, ArasParams{}, 1), ValidationError);
}

TEST_CASE("transient step with the full batch moves by -g / sigma") {
  SplitMix64 rng(1);
  auto q = make_quadratic(random_spd(rng, 4, 1.0, 5.0), random_vec(rng, 4));
  ArasParams p = full_batch_params(4);
  p.sigma0 = 50.0;
  const Vec x0 = random_vec(rng, 4);
  ArasState s = make_aras_state(q, p, 3, x0);
  transient_step(s, q, p);
  const Vec expected = x0 - q.full_grad(x0) / 50.0;
  CHECK(s.x == expected);
  CHECK(s.k == 1);
  CHECK(s.samples == 4);
}

TEST_CASE("hand-computed two-step transient trace") {
  // f = ||x||^2 / 2, x0 = (1, 2), sigma0 = 4. Step 1: x1 = 0.75 x0,
  // <g1, g0> = 0.75 * 5, rho = 0.875 so sigma -> 2. Step 2: x2 = 0.375 x0,
  // <g2, g1> = 0.75 * 0.375 * 5.
  auto q = half_norm(2);
  ArasParams p = full_batch_params(2);
  p.sigma0 = 4.0;
  ArasState s = make_aras_state(q, p, 9, (Vec(2) << 1.0, 2.0).finished());
  const ArasStepInfo first = transient_step(s, q, p);
  CHECK(first.rho == doctest::Approx(0.875));
  CHECK(s.sigma == 2.0);
  CHECK(s.pflug.sum == doctest::Approx(3.75));
  transient_step(s, q, p);
  CHECK(s.pflug.sum == doctest::Approx(3.75 + 1.40625));
  CHECK(s.x[0] == doctest::Approx(0.375));
  CHECK(s.x[1] == doctest::Approx(0.75));
  CHECK(s.pflug.steps == 2);
}

TEST_CASE("zero batch gradient leaves the state unchanged") {
  auto q = half_norm(3);
  ArasParams p = full_batch_params(3);
  ArasState s = make_aras_state(q, p, 1, Vec::Zero(3));
  const ArasStepInfo info = transient_step(s, q, p);
  CHECK(info.zero_gradient);
  CHECK(s.sigma == p.sigma0);
  CHECK(s.pflug.steps == 0);
  CHECK(s.pflug.sum == 0.0);
  CHECK(s.x == Vec::Zero(3));

  s.phase = Phase::stationary;
  const double sigma = s.sigma;
  const ArasStepInfo st = stationary_step(s, q, p);
  CHECK(st.zero_gradient);
  CHECK_FALSE(st.resampled);
  CHECK(s.sigma == sigma * 2.0);
  CHECK(s.t == 3);
}

TEST_CASE("pflug sum replays the successive same-batch inner products") {
  SplitMix64 rng(17);
  auto q = make_logistic(random_dataset(rng, 200, 5), 1e-2);
  ArasParams p;
  p.m0 = 8;
  p.m_max = 64;
  p.burn_in = 1000;
  ArasState s = make_aras_state(q, p, 33, random_vec(rng, 5));
  Sampler replica(200, 8, 64, 33);
  Vec x = s.x;
  double sigma = s.sigma;
  double sum = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Batch b = replica.draw();
    const Vec g = direct_mean_grad(q, b, x);
    const Vec x_next = x - g / sigma;
    const Vec g_next = direct_mean_grad(q, b, x_next);
    sum += g_next.dot(g);
    double f0 = 0.0, f1 = 0.0;
    for (auto i : b) {
      f0 += q.loss_i(i, x);
      f1 += q.loss_i(i, x_next);
    }
    const double rho = (f0 - f1) / 8.0 * sigma / g.squaredNorm();
    sigma = rho >= p.eta ? std::max(p.sigma_min, p.gamma1 * sigma) : p.gamma2 * sigma;
    x = x_next;
    transient_step(s, q, p);
  }
  CHECK(s.pflug.sum == doctest::Approx(sum).epsilon(1e-10));
  CHECK(s.sigma == doctest::Approx(sigma).epsilon(1e-10));
  CHECK((s.x - x).norm() <= 1e-10 * (1.0 + x.norm()));
}

TEST_CASE("noiseless quadratic keeps early inner products positive") {
  SplitMix64 rng(5);
  for (int t = 0; t < 10; ++t) {
    auto q = make_quadratic(random_spd(rng, 6, 1.0, 10.0), random_vec(rng, 6),
                            QuadraticSplit::identical);
    ArasParams p = full_batch_params(6);
    p.sigma0 = 20.0;
    ArasState s = make_aras_state(q, p, 1, random_vec(rng, 6, 5.0));
    for (int k = 0; k < 3; ++k) {
      transient_step(s, q, p);
      CHECK(s.pflug.sum > 0.0);
    }
  }
}

TEST_CASE("stationary sigma telescopes and batch sizes only grow") {
  SplitMix64 rng(8);
  PureNoiseProblem q(rng, 500, 4);
  ArasParams p;
  p.m0 = 4;
  p.m_max = 100;
  ArasState s = make_aras_state(q, p, 2, random_vec(rng, 4, 0.1));
  s.phase = Phase::stationary;
  s.sigma = 0.7;
  const double sigma_trigger = s.sigma;
  std::size_t last_m = s.sampler.batch_size();
  for (std::size_t j = 1; j <= 200; ++j) {
    const ArasStepInfo info = stationary_step(s, q, p);
    CHECK(info.batch_size <= p.m_max);
    CHECK(info.batch_size >= last_m);
    CHECK(s.sampler.batch_size() == info.batch_size);
    last_m = info.batch_size;
    CHECK(s.sigma == doctest::Approx(sigma_trigger * static_cast<double>(j + 1)).epsilon(1e-12));
  }
  CHECK(s.t == 202);
  CHECK(last_m > 4);
}

TEST_CASE("pure noise triggers the diagnostic") {
  int fired = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SplitMix64 rng(1000 + seed);
    PureNoiseProblem q(rng, 1000, 10);
    ArasParams p;
    p.m0 = 8;
    p.m_max = 256;
    p.burn_in = 20;
    ArasState s = make_aras_state(q, p, seed);
    for (std::size_t k = 0; k < 10 * p.burn_in && s.phase == Phase::transient; ++k) {
      transient_step(s, q, p);
    }
    fired += s.phase == Phase::stationary ? 1 : 0;
  }
  CHECK(fired == 20);
}

TEST_CASE("aras run trace contracts") {
  SplitMix64 rng(21);
  auto q = make_logistic(random_dataset(rng, 300, 6), 1e-3);
  ArasParams p;
  p.m0 = 10;
  p.m_max = 150;
  p.burn_in = 10;
  p.epochs = 8;
  RecorderOptions rec;
  rec.cadence = 1;
  const ArasResult r = aras_run(q, p, 4, std::nullopt, rec);
  REQUIRE(r.run.status == RunStatus::completed);
  const Trace& tr = r.run.trace;
  int flips = 0;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    CHECK(*tr[i].batch_size <= p.m_max);
    if (*tr[i].phase != *tr[i - 1].phase) {
      ++flips;
      CHECK(*tr[i].phase == Phase::stationary);
      REQUIRE(r.trigger_iteration.has_value());
      CHECK(tr[i].iteration == *r.trigger_iteration);
    }
    if (*tr[i].phase == Phase::transient) CHECK(*tr[i].batch_size == p.m0);
    if (*tr[i - 1].phase == Phase::stationary) {
      CHECK(*tr[i].sigma >= *tr[i - 1].sigma);
      CHECK(*tr[i].batch_size >= *tr[i - 1].batch_size);
    }
    CHECK(tr[i].samples > tr[i - 1].samples);
  }
  CHECK(flips <= 1);
  CHECK(flips == (r.trigger_iteration ? 1 : 0));
  // Epoch ends once N samples have been consumed within the epoch.
  std::size_t epoch_start = 0;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    if (i + 1 == tr.size() || tr[i + 1].epoch != tr[i].epoch) {
      CHECK(tr[i].samples - epoch_start >= q.size());
      epoch_start = tr[i].samples;
    }
  }
  CHECK(tr.back().epoch == p.epochs);
  CHECK(r.run.samples == tr.back().samples);

  const ArasResult again = aras_run(q, p, 4, std::nullopt, rec);
  CHECK(again.run.x == r.run.x);
}
