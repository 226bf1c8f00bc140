#include "stochopt/aras.hpp"

#include <algorithm>
#include <stdexcept>

#include "stochopt/errors.hpp"

namespace stochopt {

void pflug_update(PflugState& state, const Vec& g_new, const Vec& g_old) {
  if (g_new.size() != g_old.size()) {
    throw std::invalid_argument("Pflug update needs gradients of equal dimension");
  }
  state.sum += g_new.dot(g_old);
  ++state.steps;
  state.prev_grad = g_new;
}

bool pflug_triggered(const PflugState& state) {
  return state.steps > state.burn_in && state.sum < 0.0;
}

double update_sigma_two_branch(double sigma, double rho, double eta, double gamma1,
                               double gamma2, double sigma_min) {
  if (rho >= eta) return std::max(sigma_min, gamma1 * sigma);
  return gamma2 * sigma;
}

std::vector<std::string> ArasParams::violations() const {
  std::vector<std::string> out;
  if (!(sigma_min > 0.0)) out.emplace_back("sigma_min must be > 0");
  if (!(sigma0 >= sigma_min)) out.emplace_back("sigma0 must be >= sigma_min");
  if (!(eta > 0.0 && eta < 1.0)) out.emplace_back("need 0 < eta < 1");
  if (!(gamma1 > 0.0 && gamma1 < 1.0 && gamma2 > 1.0)) {
    out.emplace_back("need 0 < gamma1 < 1 < gamma2");
  }
  if (m0 < 1) out.emplace_back("m0 must be >= 1");
  if (m0 > m_max) out.emplace_back("m0 must be <= m_max");
  if (burn_in < 1) out.emplace_back("burn_in must be >= 1");
  if (epochs < 1) out.emplace_back("epochs must be >= 1");
  return out;
}

void ArasParams::validate() const { throw_if_invalid(violations()); }

ArasState make_aras_state(const FiniteSumProblem& problem, const ArasParams& params,
                          std::uint64_t seed, std::optional<Vec> x0) {
  auto problems = params.violations();
  if (params.m_max > problem.size()) problems.emplace_back("m_max must be <= N");
  throw_if_invalid(std::move(problems));
  Vec x = x0 ? std::move(*x0) : Vec::Zero(static_cast<Eigen::Index>(problem.dim()));
  if (static_cast<std::size_t>(x.size()) != problem.dim()) {
    throw std::invalid_argument("initial point has the wrong dimension");
  }
  PflugState pflug;
  pflug.burn_in = params.burn_in;
  return ArasState{std::move(x), params.sigma0, 0, 2, Phase::transient, std::move(pflug),
                   Sampler(problem.size(), params.m0, params.m_max, seed), 0, 0};
}

ArasStepInfo transient_step(ArasState& state, const FiniteSumProblem& problem,
                            const ArasParams& params) {
  if (state.phase != Phase::transient) throw std::logic_error("not in the transient phase");
  ArasStepInfo info;
  const Batch batch = state.sampler.draw();
  info.batch_size = batch.size();
  const Vec g = problem.batch_grad(batch, state.x);
  const double gnorm_sq = g.squaredNorm();
  ++state.k;
  state.samples += batch.size();
  state.epoch_samples += batch.size();
  if (gnorm_sq == 0.0) {
    info.zero_gradient = true;
    return info;
  }

  const Vec next = state.x - g / state.sigma;
  const double f_old = problem.batch_loss(batch, state.x);
  const double f_new = problem.batch_loss(batch, next);
  const Vec g_next = problem.batch_grad(batch, next);
  info.rho = (f_old - f_new) * state.sigma / gnorm_sq;

  state.sigma = update_sigma_two_branch(state.sigma, info.rho, params.eta, params.gamma1,
                                        params.gamma2, params.sigma_min);
  pflug_update(state.pflug, g_next, g);
  state.x = next;
  if (pflug_triggered(state.pflug)) {
    state.phase = Phase::stationary;
    info.triggered = true;
  }
  return info;
}

ArasStepInfo stationary_step(ArasState& state, const FiniteSumProblem& problem,
                             const ArasParams& params) {
  if (state.phase != Phase::stationary) throw std::logic_error("not in the stationary phase");
  ArasStepInfo info;
  // The variance estimate needs two samples.
  if (state.sampler.batch_size() < 2 && params.m_max >= 2) state.sampler.set_batch_size(2);

  Batch batch = state.sampler.draw();
  Vec g = problem.batch_grad(batch, state.x);
  double gnorm_sq = g.squaredNorm();
  if (gnorm_sq == 0.0) {
    info.zero_gradient = true;
  } else if (batch.size() >= 2) {
    const double var_l1 = sample_variance_l1(problem, batch, state.x, g);
    if (!norm_test(var_l1, batch.size(), state.sigma, gnorm_sq)) {
      const std::size_t m = std::max<std::size_t>(
          adaptive_batch_size(state.sigma, var_l1, gnorm_sq, params.m_max),
          std::min<std::size_t>(2, params.m_max));
      state.sampler.set_batch_size(m);
      batch = state.sampler.draw();
      g = problem.batch_grad(batch, state.x);
      info.resampled = true;
    }
  }
  info.batch_size = batch.size();
  state.x -= g / state.sigma;
  const double t = static_cast<double>(state.t);
  state.sigma = state.sigma * t / (t - 1.0);
  ++state.t;
  ++state.k;
  state.samples += batch.size();
  state.epoch_samples += batch.size();
  return info;
}

ArasResult aras_run(const FiniteSumProblem& problem, const ArasParams& params,
                    std::uint64_t seed, std::optional<Vec> x0, RecorderOptions recorder_options) {
  ArasState state = make_aras_state(problem, params, seed, std::move(x0));
  Recorder recorder(problem, std::move(recorder_options));
  ArasResult result;

  auto record = [&](std::size_t epoch, bool epoch_end) {
    MetricsRecord r;
    r.epoch = epoch;
    r.iteration = state.k;
    r.samples = state.samples;
    r.batch_size = state.sampler.batch_size();
    r.sigma = state.sigma;
    r.pflug_sum = state.pflug.sum;
    r.phase = state.phase;
    recorder.observe(r, state.x, epoch_end);
  };
  record(0, false);

  const std::size_t n = problem.size();
  try {
    for (std::size_t epoch = 1; epoch <= params.epochs; ++epoch) {
      state.epoch_samples = 0;
      while (state.epoch_samples < n) {
        ArasStepInfo info = state.phase == Phase::transient
                                ? transient_step(state, problem, params)
                                : stationary_step(state, problem, params);
        if (info.triggered) result.trigger_iteration = state.k;
        if (!state.x.allFinite()) throw std::domain_error("iterate became non-finite");
        record(epoch, state.epoch_samples >= n);
      }
    }
  } catch (const std::domain_error& e) {
    result.run.status = RunStatus::diverged;
    result.run.message = e.what();
  }

  result.final_sigma = state.sigma;
  result.final_batch_size = state.sampler.batch_size();
  result.run.trace = recorder.take();
  result.run.x = std::move(state.x);
  result.run.iterations = state.k;
  result.run.samples = state.samples;
  return result;
}

}  // namespace stochopt
