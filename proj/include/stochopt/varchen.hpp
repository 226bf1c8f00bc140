#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stochopt/lbfgs.hpp"
#include "stochopt/metrics.hpp"
#include "stochopt/problems.hpp"
#include "stochopt/schedule.hpp"
#include "stochopt/types.hpp"

namespace stochopt {

// Variance-reduced stochastic damped L-BFGS with controlled Hessian norm.
//
// Each epoch fixes an anchor x_a with its full gradient and walks one random
// permutation of the data in batches. Steps are x += alpha_k * d with
// d = -H g~ and g~ the SVRG-corrected batch gradient. Before each direction,
// certified bounds [lambda_k, Lambda_k] on the spectrum of H are computed;
// leaving [lambda_min, lambda_max] flushes the memory down to its newest pair.

struct AnchorState {
  Vec x;
  Vec full_grad;
  std::size_t consumed = 0;  // samples drawn since the anchor was set
};

AnchorState make_anchor(const FiniteSumProblem& problem, const Vec& x);

// g(x, B) - g(x_a, B) + grad f(x_a). A batch covering the whole data set
// returns g(x, B) directly, since the correction then cancels identically.
Vec svrg_gradient(const FiniteSumProblem& problem, BatchView batch, const Vec& x,
                  const AnchorState& anchor);
// Same, reusing an already computed g(x, B).
Vec svrg_gradient(const FiniteSumProblem& problem, BatchView batch, const Vec& batch_grad_x,
                  const AnchorState& anchor, std::size_t population);

struct VarchenParams {
  std::size_t memory = 10;
  double eta = 0.25;
  double lambda_min = 1e-5;
  double lambda_max = 1e5;
  double gamma_under = 0.1;
  double gamma_over = 1e5;
  std::size_t batch_size = 64;
  StepSchedule schedule = StepSchedule::constant(0.1);
  std::size_t epochs = 10;

  // Bounds still computed and recorded, never enforced.
  VarchenParams without_control() const {
    VarchenParams p = *this;
    p.lambda_min = 0.0;
    p.lambda_max = std::numeric_limits<double>::infinity();
    return p;
  }

  std::vector<std::string> violations() const;
  void validate() const;
};

struct VarchenStats {
  std::size_t flushes = 0;
  std::size_t pushes = 0;
  std::size_t skipped_pushes = 0;  // s == 0
  double max_upper = 0.0;          // largest Lambda_k seen after enforcement
  double min_lower = std::numeric_limits<double>::infinity();
};

struct VarchenResult {
  RunResult run;
  VarchenStats stats;
};

VarchenResult varchen_run(const FiniteSumProblem& problem, const VarchenParams& params,
                          std::uint64_t seed, std::optional<Vec> x0 = std::nullopt,
                          RecorderOptions recorder = {});

}  // namespace stochopt
