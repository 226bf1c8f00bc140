#include "stochopt/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace stochopt {

std::vector<std::string> StepSchedule::violations() const {
  std::vector<std::string> out;
  if (!(std::isfinite(c) && c >= 0.0)) out.push_back("step constant must be finite and >= 0");
  if (kind == Kind::power && !(beta > 0.5 && beta < 1.0)) {
    out.push_back("power schedule needs 0.5 < beta < 1");
  }
  return out;
}

double step_size(const StepSchedule& schedule, std::size_t k) {
  switch (schedule.kind) {
    case StepSchedule::Kind::constant:
      return schedule.c;
    case StepSchedule::Kind::harmonic:
      return schedule.c / (static_cast<double>(k) + 1.0);
    case StepSchedule::Kind::power:
      return schedule.c * std::pow(static_cast<double>(k == 0 ? 1 : k), -schedule.beta);
  }
  return schedule.c;
}

std::string_view to_string(StepSchedule::Kind kind) {
  switch (kind) {
    case StepSchedule::Kind::constant: return "constant";
    case StepSchedule::Kind::harmonic: return "harmonic";
    case StepSchedule::Kind::power: return "power";
  }
  return "constant";
}

StepSchedule::Kind parse_schedule_kind(std::string_view name) {
  if (name == "constant") return StepSchedule::Kind::constant;
  if (name == "harmonic") return StepSchedule::Kind::harmonic;
  if (name == "power") return StepSchedule::Kind::power;
  throw std::invalid_argument("unknown step schedule '" + std::string(name) +
                              "' (valid: constant, harmonic, power)");
}

double harmonic_step_limit(double lipschitz, double lambda_min, double lambda_max) {
  return lambda_min / (lipschitz * lambda_max);
}

double power_step_limit(double lipschitz, double lambda_min, double lambda_max) {
  return lambda_min / (lipschitz * lambda_max * lambda_max);
}

}  // namespace stochopt
