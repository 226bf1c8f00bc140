#include "stochopt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stochopt/errors.hpp"
#include "stochopt/sampling.hpp"
#include "stochopt/varchen.hpp"

namespace stochopt {

std::vector<std::string> BaselineParams::violations() const {
  std::vector<std::string> out = schedule.violations();
  if (!(momentum >= 0.0 && momentum < 1.0)) out.push_back("momentum must lie in [0, 1)");
  if (batch_size == 0) out.push_back("batch_size must be >= 1");
  if (epochs == 0) out.push_back("epochs must be >= 1");
  return out;
}

void BaselineParams::validate() const { throw_if_invalid(violations()); }

namespace {

Vec initial_point(const FiniteSumProblem& problem, std::optional<Vec> x0) {
  Vec x = x0 ? std::move(*x0) : Vec::Zero(static_cast<Eigen::Index>(problem.dim()));
  if (x.size() != static_cast<Eigen::Index>(problem.dim())) {
    throw std::invalid_argument("x0 has the wrong dimension");
  }
  return x;
}

// Shared epoch loop. `step(batch, k)` updates the iterate in place; `begin`
// runs at the start of each epoch.
template <class Begin, class Step>
RunResult epoch_loop(const FiniteSumProblem& problem, const BaselineParams& params,
                     std::uint64_t seed, Vec& x, RecorderOptions recorder_options, Begin begin,
                     Step step) {
  params.validate();
  const std::size_t n = problem.size();
  if (params.batch_size > n) throw std::invalid_argument("batch_size exceeds the number of samples");

  Sampler sampler(n, params.batch_size, params.batch_size, seed);
  Recorder recorder(problem, std::move(recorder_options));
  RunResult result;
  std::size_t k = 0;
  std::size_t samples = 0;

  {
    MetricsRecord r;
    r.batch_size = params.batch_size;
    recorder.observe(r, x, false);
  }

  try {
    for (std::size_t epoch = 1; epoch <= params.epochs; ++epoch) {
      begin();
      sampler.start_epoch();
      std::size_t consumed = 0;
      while (consumed < n) {
        const std::size_t m = std::min(params.batch_size, n - consumed);
        const Batch batch = sampler.next_in_epoch(m);
        step(batch, step_size(params.schedule, k));
        if (!x.allFinite()) throw std::domain_error("iterate became non-finite");
        consumed += m;
        samples += m;
        ++k;

        MetricsRecord r;
        r.epoch = epoch;
        r.iteration = k;
        r.samples = samples;
        r.batch_size = m;
        recorder.observe(r, x, consumed >= n);
      }
    }
  } catch (const std::domain_error& e) {
    result.status = RunStatus::diverged;
    result.message = e.what();
  }

  result.trace = recorder.take();
  result.iterations = k;
  result.samples = samples;
  return result;
}

}  // namespace

RunResult sgd_run(const FiniteSumProblem& problem, const BaselineParams& params,
                  std::uint64_t seed, std::optional<Vec> x0, RecorderOptions recorder) {
  Vec x = initial_point(problem, std::move(x0));
  RunResult result = epoch_loop(
      problem, params, seed, x, std::move(recorder), [] {},
      [&](const Batch& batch, double alpha) { x -= alpha * problem.batch_grad(batch, x); });
  result.x = std::move(x);
  return result;
}

RunResult sgd_momentum_run(const FiniteSumProblem& problem, const BaselineParams& params,
                           std::uint64_t seed, std::optional<Vec> x0, RecorderOptions recorder) {
  Vec x = initial_point(problem, std::move(x0));
  Vec v = Vec::Zero(x.size());
  const double mu = params.momentum;
  RunResult result = epoch_loop(problem, params, seed, x, std::move(recorder), [] {},
                                [&](const Batch& batch, double alpha) {
                                  v = mu * v - alpha * problem.batch_grad(batch, x);
                                  x += v;
                                });
  result.x = std::move(x);
  return result;
}

RunResult svrg_run(const FiniteSumProblem& problem, const BaselineParams& params,
                   std::uint64_t seed, std::optional<Vec> x0, RecorderOptions recorder) {
  Vec x = initial_point(problem, std::move(x0));
  AnchorState anchor;
  RunResult result = epoch_loop(
      problem, params, seed, x, std::move(recorder), [&] { anchor = make_anchor(problem, x); },
      [&](const Batch& batch, double alpha) { x -= alpha * svrg_gradient(problem, batch, x, anchor); });
  result.x = std::move(x);
  return result;
}

}  // namespace stochopt
