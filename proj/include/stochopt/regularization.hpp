#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stochopt/metrics.hpp"
#include "stochopt/problems.hpp"
#include "stochopt/rng.hpp"
#include "stochopt/types.hpp"

namespace stochopt {

// Adaptive quadratic regularization with inexact gradients (ARIG).
//
// Each iteration minimizes the model f(x) + g^T s + sigma/2 ||s||^2, i.e.
// takes s = -g / sigma, and adapts sigma from the ratio of actual to
// predicted decrease. The gradient oracle is asked for relative accuracy
// omega_g = 1 / sigma.

struct RegParams {
  double epsilon = 1e-6;
  double sigma0 = 1.0;
  double sigma_min = 1e-3;
  double eta1 = 0.25;
  double eta2 = 0.75;
  double gamma1 = 0.5;
  double gamma2 = 1.5;
  double gamma3 = 2.0;
  // Inexact-value mode only; must satisfy eta0 < eta1 / 2.
  double eta0 = 0.1;
  std::size_t max_iters = 100000;
  std::size_t max_consecutive_rejections = 100;

  std::vector<std::string> violations() const;
  void validate() const;
};

// Predicted decrease of the linear model at s = -g/sigma: ||g||^2 / sigma.
double model_decrease(double sigma, double gnorm_sq);

// (f_old - f_new) * sigma / ||g||^2.
double rho_ratio(double f_old, double f_new, double sigma, double gnorm_sq);

// rho >= eta2:        max(sigma_min, gamma1 sigma)   (very successful)
// eta1 <= rho < eta2: gamma2 sigma                   (successful)
// rho < eta1:         gamma3 sigma                   (rejected)
double update_sigma(double sigma, double rho, const RegParams& params);

// max(sigma0, gamma3 (L/2 + 1) / (1 - eta2)); bounds sigma_k on every run.
double sigma_max_bound(double lipschitz, const RegParams& params);

struct ComplexityBudget {
  double kappa_s = 0.0;
  double max_successful = 0.0;  // floor(kappa_s (f0 - f_low) / eps^2)
  double max_total = 0.0;
};

ComplexityBudget complexity_budget(double f0, double f_low, double epsilon,
                                   const RegParams& params, double lipschitz);

// max(omega_f, omega_f_hat) <= eta0 * model_dec. When it holds, an inexact
// ratio >= eta1 guarantees an exact ratio >= eta1 - 2 eta0.
bool check_inexact_decrease(double omega_f, double omega_f_hat, double eta0, double model_dec);

// g together with the relative error it actually carries,
// ||g - grad f(x)|| <= omega ||g||. Exact oracles report 0.
struct OracleGradient {
  Vec g;
  double omega = 0.0;
};

// Called with the requested accuracy omega_g; must return omega <= omega_g.
using GradientOracle = std::function<OracleGradient(const Vec& x, double omega_g)>;
// Returns a value within omega_f of f(x).
using ValueOracle = std::function<double(const Vec& x, double omega_f)>;

struct RegState {
  Vec x;
  double sigma = 1.0;
  std::size_t k = 0;
  std::size_t successful = 0;
  std::size_t very_successful = 0;
  std::size_t rejected = 0;
  std::size_t consecutive_rejections = 0;
  std::size_t gradient_evaluations = 0;
  std::size_t value_evaluations = 0;
  // Gradient of the current iterate; kept across rejected trials.
  std::optional<Vec> gradient;
  double omega_g = 0.0;         // requested for the stored gradient
  double omega_achieved = 0.0;  // reported by the oracle
  // Cached exact f(x) (exact-value mode).
  std::optional<double> value;
  double last_rho = 0.0;
  double last_model_decrease = 0.0;
};

RegState make_reg_state(Vec x0, const RegParams& params);

enum class StepOutcome { terminated, accepted, rejected };

// One ARIG trial. A rejected trial keeps the gradient and retries with the
// enlarged sigma on the next call, without querying the gradient oracle, as
// long as the stored gradient's reported error is still within 1 / sigma.
// Otherwise the next call fetches a fresh gradient at the new accuracy.
// With inexact_values, both function values are requested to accuracy
// eta0 * model_decrease each trial.
StepOutcome arig_step(RegState& state, const RegParams& params, const GradientOracle& gradient,
                      const ValueOracle& value, bool inexact_values = false);

enum class OracleMode { exact, inexact_gradient, inexact_gradient_and_value };

// Gradient with relative error exactly omega: ||g - exact|| = omega ||g||,
// along a random direction when omega < 1, shrunk toward zero otherwise.
Vec perturb_relative(const Vec& exact, double omega, SplitMix64& rng);

struct ArigIteration {
  std::size_t k = 0;
  double sigma = 0.0;  // sigma used for the trial
  double rho = 0.0;
  bool accepted = false;
};

struct ArigResult {
  RunResult run;
  std::vector<ArigIteration> iterations;
  std::size_t successful = 0;
  std::size_t total = 0;
  double max_sigma = 0.0;
};

ArigResult arig_run(const FiniteSumProblem& problem, const RegParams& params, OracleMode mode,
                    std::uint64_t seed, std::optional<Vec> x0 = std::nullopt,
                    RecorderOptions recorder = {});

}  // namespace stochopt
