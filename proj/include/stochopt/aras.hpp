#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stochopt/metrics.hpp"
#include "stochopt/problems.hpp"
#include "stochopt/sampling.hpp"
#include "stochopt/types.hpp"

namespace stochopt {

// Adaptive regularization and sampling (ARAS).
//
// Transient phase: fixed batch size, step -g/sigma always accepted, sigma
// adapted from a same-batch decrease ratio, and a running sum of successive
// gradient inner products (Pflug's statistic). When that sum turns negative
// after the burn-in, the run switches once and for all to the stationary
// phase: batch size grows via the norm test and sigma grows as
// sigma * t / (t - 1), giving harmonic step sizes.

struct PflugState {
  double sum = 0.0;
  std::size_t steps = 0;
  std::size_t burn_in = 1;
  Vec prev_grad;
};

// sum += <g_new, g_old>, steps += 1.
void pflug_update(PflugState& state, const Vec& g_new, const Vec& g_old);

// steps > burn_in and sum < 0.
bool pflug_triggered(const PflugState& state);

// rho >= eta: max(sigma_min, gamma1 sigma); otherwise gamma2 sigma.
double update_sigma_two_branch(double sigma, double rho, double eta, double gamma1,
                               double gamma2, double sigma_min);

struct ArasParams {
  double sigma0 = 1.0;
  double sigma_min = 1e-3;
  double eta = 0.25;
  double gamma1 = 0.5;
  double gamma2 = 2.0;
  std::size_t m0 = 32;
  std::size_t m_max = 512;
  std::size_t burn_in = 20;
  std::size_t epochs = 10;

  std::vector<std::string> violations() const;
  void validate() const;
};

struct ArasState {
  Vec x;
  double sigma = 1.0;
  std::size_t k = 0;
  std::size_t t = 2;
  Phase phase = Phase::transient;
  PflugState pflug;
  Sampler sampler;
  std::size_t samples = 0;        // cumulative
  std::size_t epoch_samples = 0;  // since the current epoch began
};

// Checks params against the problem (m_max <= N) and seeds the sampler.
ArasState make_aras_state(const FiniteSumProblem& problem, const ArasParams& params,
                          std::uint64_t seed, std::optional<Vec> x0 = std::nullopt);

struct ArasStepInfo {
  std::size_t batch_size = 0;  // final size of the batch used for the step
  double rho = 0.0;            // transient only
  bool zero_gradient = false;
  bool resampled = false;      // stationary only
  bool triggered = false;      // transient -> stationary on this step
};

ArasStepInfo transient_step(ArasState& state, const FiniteSumProblem& problem,
                            const ArasParams& params);
ArasStepInfo stationary_step(ArasState& state, const FiniteSumProblem& problem,
                             const ArasParams& params);

struct ArasResult {
  RunResult run;
  std::optional<std::size_t> trigger_iteration;
  double final_sigma = 0.0;
  std::size_t final_batch_size = 0;
};

// An epoch ends once the samples consumed since it began reach N.
ArasResult aras_run(const FiniteSumProblem& problem, const ArasParams& params,
                    std::uint64_t seed, std::optional<Vec> x0 = std::nullopt,
                    RecorderOptions recorder = {});

}  // namespace stochopt
