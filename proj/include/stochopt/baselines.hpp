#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stochopt/metrics.hpp"
#include "stochopt/problems.hpp"
#include "stochopt/schedule.hpp"
#include "stochopt/types.hpp"

namespace stochopt {

// Reference first-order methods. All walk one random permutation of the data
// per epoch in batches of min(m, remaining) samples, so sample budgets line
// up with the other drivers.

struct BaselineParams {
  StepSchedule schedule = StepSchedule::constant(0.1);
  double momentum = 0.0;  // heavy-ball coefficient, sgd_momentum_run only
  std::size_t batch_size = 32;
  std::size_t epochs = 10;

  std::vector<std::string> violations() const;
  void validate() const;
};

// x <- x - alpha_k g(x, B).
RunResult sgd_run(const FiniteSumProblem& problem, const BaselineParams& params,
                  std::uint64_t seed, std::optional<Vec> x0 = std::nullopt,
                  RecorderOptions recorder = {});

// v <- mu v - alpha_k g(x, B); x <- x + v; v starts at zero.
RunResult sgd_momentum_run(const FiniteSumProblem& problem, const BaselineParams& params,
                           std::uint64_t seed, std::optional<Vec> x0 = std::nullopt,
                           RecorderOptions recorder = {});

// x <- x - alpha_k g~(x, B) with a per-epoch anchor; inner loop is one pass.
RunResult svrg_run(const FiniteSumProblem& problem, const BaselineParams& params,
                   std::uint64_t seed, std::optional<Vec> x0 = std::nullopt,
                   RecorderOptions recorder = {});

}  // namespace stochopt
