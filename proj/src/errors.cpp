#include "stochopt/errors.hpp"

namespace stochopt {

namespace {

std::string join(const std::vector<std::string>& problems) {
  std::string msg;
  for (const auto& p : problems) {
    if (!msg.empty()) msg += "; ";
    msg += p;
  }
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::invalid_argument(join(problems)), problems_(std::move(problems)) {}

void throw_if_invalid(std::vector<std::string> problems) {
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

}  // namespace stochopt
