#include "stochopt/rng.hpp"

#include <cmath>
#include <numbers>

namespace stochopt {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Largest multiple of bound that fits; draws above it are rejected.
  const std::uint64_t limit = max() - (max() % bound + 1) % bound;
  std::uint64_t r;
  do {
    r = (*this)();
  } while (r > limit);
  return r % bound;
}

double SplitMix64::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace stochopt
