#include "stochopt/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stochopt/errors.hpp"

namespace stochopt {

std::vector<std::string> RegParams::violations() const {
  std::vector<std::string> out;
  if (!(epsilon > 0.0)) out.emplace_back("epsilon must be > 0");
  if (!(sigma_min > 0.0)) out.emplace_back("sigma_min must be > 0");
  if (!(sigma0 >= sigma_min)) out.emplace_back("sigma0 must be >= sigma_min");
  if (!(eta1 > 0.0 && eta1 <= eta2 && eta2 < 1.0)) {
    out.emplace_back("need 0 < eta1 <= eta2 < 1");
  }
  if (!(gamma1 > 0.0 && gamma1 < 1.0 && 1.0 < gamma2 && gamma2 < gamma3)) {
    out.emplace_back("need 0 < gamma1 < 1 < gamma2 < gamma3");
  }
  if (!(eta0 >= 0.0 && eta0 < 0.5 * eta1)) out.emplace_back("need 0 <= eta0 < eta1 / 2");
  if (max_iters < 1) out.emplace_back("max_iters must be >= 1");
  if (max_consecutive_rejections < 1) out.emplace_back("max_consecutive_rejections must be >= 1");
  return out;
}

void RegParams::validate() const { throw_if_invalid(violations()); }

double model_decrease(double sigma, double gnorm_sq) {
  if (!(sigma > 0.0)) throw std::invalid_argument("model decrease needs sigma > 0");
  return gnorm_sq / sigma;
}

double rho_ratio(double f_old, double f_new, double sigma, double gnorm_sq) {
  if (!(gnorm_sq > 0.0)) throw std::invalid_argument("ratio undefined for a zero gradient");
  return (f_old - f_new) * sigma / gnorm_sq;
}

double update_sigma(double sigma, double rho, const RegParams& params) {
  if (rho >= params.eta2) return std::max(params.sigma_min, params.gamma1 * sigma);
  if (rho >= params.eta1) return params.gamma2 * sigma;
  return params.gamma3 * sigma;
}

double sigma_max_bound(double lipschitz, const RegParams& params) {
  if (!(lipschitz > 0.0)) throw std::invalid_argument("Lipschitz constant must be > 0");
  return std::max(params.sigma0,
                  params.gamma3 * (0.5 * lipschitz + 1.0) / (1.0 - params.eta2));
}

ComplexityBudget complexity_budget(double f0, double f_low, double epsilon,
                                   const RegParams& params, double lipschitz) {
  if (!(f0 >= f_low)) throw std::invalid_argument("need f0 >= f_low");
  if (!(epsilon > 0.0)) throw std::invalid_argument("need epsilon > 0");
  const double sigma_max = sigma_max_bound(lipschitz, params);
  ComplexityBudget b;
  b.kappa_s = (1.0 + sigma_max) * (1.0 + sigma_max) / (params.eta1 * params.sigma_min);
  b.max_successful = std::floor(b.kappa_s * (f0 - f_low) / (epsilon * epsilon));
  const double log_g2 = std::log(params.gamma2);
  b.max_total = b.max_successful * (1.0 + std::abs(std::log(params.gamma1)) / log_g2) +
                std::log(sigma_max / params.sigma0) / log_g2;
  return b;
}

bool check_inexact_decrease(double omega_f, double omega_f_hat, double eta0, double model_dec) {
  if (!(model_dec > 0.0)) throw std::invalid_argument("model decrease must be > 0");
  return std::max(omega_f, omega_f_hat) <= eta0 * model_dec;
}

RegState make_reg_state(Vec x0, const RegParams& params) {
  RegState s;
  s.x = std::move(x0);
  s.sigma = params.sigma0;
  return s;
}

StepOutcome arig_step(RegState& state, const RegParams& params, const GradientOracle& gradient,
                      const ValueOracle& value, bool inexact_values) {
  if (!state.gradient) {
    state.omega_g = 1.0 / state.sigma;
    OracleGradient answer = gradient(state.x, state.omega_g);
    ++state.gradient_evaluations;
    if (answer.g.size() != state.x.size()) {
      throw std::runtime_error("gradient oracle returned a vector of the wrong size");
    }
    if (!(answer.omega >= 0.0)) throw std::runtime_error("gradient oracle reported a bad accuracy");
    state.gradient = std::move(answer.g);
    state.omega_achieved = answer.omega;
    const double omega = std::max(state.omega_g, state.omega_achieved);
    if (state.gradient->norm() <= params.epsilon / (1.0 + omega)) {
      return StepOutcome::terminated;
    }
  }
  const Vec& g = *state.gradient;
  const double gnorm_sq = g.squaredNorm();
  const double sigma = state.sigma;
  const Vec trial = state.x - g / sigma;
  const double predicted = model_decrease(sigma, gnorm_sq);

  double f_old;
  double f_new;
  if (inexact_values) {
    const double omega_f = params.eta0 * predicted;
    f_old = value(state.x, omega_f);
    f_new = value(trial, omega_f);
    state.value_evaluations += 2;
  } else {
    if (!state.value) {
      state.value = value(state.x, 0.0);
      ++state.value_evaluations;
    }
    f_old = *state.value;
    f_new = value(trial, 0.0);
    ++state.value_evaluations;
  }

  const double rho = rho_ratio(f_old, f_new, sigma, gnorm_sq);
  state.last_rho = rho;
  state.last_model_decrease = predicted;
  state.sigma = update_sigma(sigma, rho, params);
  ++state.k;

  if (rho >= params.eta1) {
    state.x = trial;
    state.gradient.reset();
    state.value = inexact_values ? std::nullopt : std::optional<double>(f_new);
    ++state.successful;
    if (rho >= params.eta2) ++state.very_successful;
    state.consecutive_rejections = 0;
    return StepOutcome::accepted;
  }
  ++state.rejected;
  ++state.consecutive_rejections;
  if (state.omega_achieved > 1.0 / state.sigma) state.gradient.reset();
  return StepOutcome::rejected;
}

Vec perturb_relative(const Vec& exact, double omega, SplitMix64& rng) {
  if (!(omega >= 0.0)) throw std::invalid_argument("relative error must be >= 0");
  const double hnorm = exact.norm();
  if (hnorm == 0.0 || omega == 0.0) return exact;
  if (omega >= 1.0) return exact / (1.0 + omega);
  Vec u(exact.size());
  double unorm = 0.0;
  do {
    for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = rng.normal();
    unorm = u.norm();
  } while (unorm == 0.0);
  u /= unorm;
  // Positive root of (1 - w^2) t^2 - 2 w^2 (h.u) t - w^2 |h|^2 = 0, which
  // makes |t u| = w |h + t u|.
  const double w2 = omega * omega;
  const double hu = exact.dot(u);
  const double t =
      (w2 * hu + std::sqrt(w2 * w2 * hu * hu + (1.0 - w2) * w2 * hnorm * hnorm)) / (1.0 - w2);
  return exact + t * u;
}

ArigResult arig_run(const FiniteSumProblem& problem, const RegParams& params, OracleMode mode,
                    std::uint64_t seed, std::optional<Vec> x0, RecorderOptions recorder_options) {
  params.validate();
  const std::size_t n = problem.dim();
  const std::size_t samples_per_eval = problem.size();
  SplitMix64 rng(seed);

  GradientOracle gradient = [&](const Vec& x, double omega) -> OracleGradient {
    Vec exact = problem.full_grad(x);
    if (mode == OracleMode::exact) return {std::move(exact), 0.0};
    return {perturb_relative(exact, omega, rng), omega};
  };
  ValueOracle value = [&](const Vec& x, double omega) -> double {
    const double exact = problem.full_loss(x);
    if (mode != OracleMode::inexact_gradient_and_value || omega == 0.0) return exact;
    return exact + omega * (2.0 * rng.uniform() - 1.0);
  };
  const bool inexact_values = mode == OracleMode::inexact_gradient_and_value;

  RegState state = make_reg_state(x0 ? std::move(*x0) : Vec::Zero(static_cast<Eigen::Index>(n)),
                                  params);
  Recorder recorder(problem, std::move(recorder_options));
  ArigResult result;
  result.max_sigma = state.sigma;

  auto record = [&](bool final_row) {
    MetricsRecord r;
    r.epoch = state.k;
    r.iteration = state.k;
    r.samples = samples_per_eval * state.gradient_evaluations;
    r.batch_size = samples_per_eval;
    r.sigma = state.sigma;
    recorder.observe(r, state.x, final_row);
  };
  record(false);

  RunStatus status = RunStatus::budget_exhausted;
  while (state.k < params.max_iters) {
    const double sigma_used = state.sigma;
    StepOutcome outcome;
    try {
      outcome = arig_step(state, params, gradient, value, inexact_values);
    } catch (const std::domain_error& e) {
      status = RunStatus::diverged;
      result.run.message = e.what();
      break;
    }
    if (outcome == StepOutcome::terminated) {
      status = RunStatus::converged;
      break;
    }
    result.iterations.push_back(
        {state.k, sigma_used, state.last_rho, outcome == StepOutcome::accepted});
    result.max_sigma = std::max(result.max_sigma, state.sigma);
    if (state.consecutive_rejections >= params.max_consecutive_rejections) {
      status = RunStatus::rejection_limit;
      result.run.message = "aborted after " + std::to_string(state.consecutive_rejections) +
                           " consecutive rejected steps";
      break;
    }
    record(false);
  }
  record(true);

  result.successful = state.successful;
  result.total = state.k;
  result.run.trace = recorder.take();
  result.run.x = state.x;
  result.run.iterations = state.k;
  result.run.samples = samples_per_eval * state.gradient_evaluations;
  result.run.status = status;
  return result;
}

}  // namespace stochopt
