#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace stochopt {

// Step-size sequences indexed by the global iteration counter k >= 0.
//   constant: c
//   harmonic: c / (k + 1)
//   power:    c * max(k, 1)^(-beta), 1/2 < beta < 1
struct StepSchedule {
  enum class Kind { constant, harmonic, power };

  Kind kind = Kind::constant;
  double c = 0.1;
  double beta = 0.75;

  static StepSchedule constant(double c) { return {Kind::constant, c, 0.75}; }
  static StepSchedule harmonic(double c) { return {Kind::harmonic, c, 0.75}; }
  static StepSchedule power(double c, double beta) { return {Kind::power, c, beta}; }

  std::vector<std::string> violations() const;
};

double step_size(const StepSchedule& schedule, std::size_t k);

std::string_view to_string(StepSchedule::Kind kind);
// Throws std::invalid_argument listing the valid names.
StepSchedule::Kind parse_schedule_kind(std::string_view name);

// Largest c for which the harmonic schedule carries a convergence guarantee
// on a strongly convex objective with gradient Lipschitz constant L.
double harmonic_step_limit(double lipschitz, double lambda_min, double lambda_max);
// Same for the power schedule.
double power_step_limit(double lipschitz, double lambda_min, double lambda_max);

}  // namespace stochopt
