#pragma once

#include <cstdint>

namespace stochopt {

// SplitMix64: a counter-based 64-bit generator. The state is a Weyl counter
// advanced by a fixed odd increment; each output is a bijective mix of the
// counter. Output depends only on (seed, number of draws), so streams are
// reproducible bit-for-bit across platforms.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : counter_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    counter_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = counter_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the spare variate is cached.
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t counter_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace stochopt
