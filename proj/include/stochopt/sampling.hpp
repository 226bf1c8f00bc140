#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stochopt/problems.hpp"
#include "stochopt/rng.hpp"
#include "stochopt/types.hpp"

namespace stochopt {

// Mini-batch source over a population of N sample indices.
//
// Two drawing modes share one SplitMix64 stream:
//  - draw(m): m distinct indices, uniform over all m-subsets, fresh each call.
//  - next_in_epoch(m): the next m indices of a per-epoch random permutation,
//    so that one epoch touches every sample exactly once.
//
// Also carries the current batch size m_k and its cap m_max, with
// 1 <= m_k <= m_max <= N. Single-owner; not thread-safe.
class Sampler {
 public:
  Sampler(std::size_t population, std::size_t batch_size, std::size_t max_batch,
          std::uint64_t seed);

  std::size_t population() const { return pool_.size(); }
  std::size_t batch_size() const { return batch_size_; }
  std::size_t max_batch() const { return max_batch_; }
  std::uint64_t seed() const { return seed_; }

  void set_batch_size(std::size_t m);

  Batch draw(std::size_t m);
  Batch draw() { return draw(batch_size_); }

  // Reshuffles and rewinds the epoch permutation.
  void start_epoch();
  std::size_t remaining_in_epoch() const { return epoch_order_.size() - cursor_; }
  // Requires 1 <= m <= remaining_in_epoch().
  Batch next_in_epoch(std::size_t m);

 private:
  SplitMix64 rng_;
  std::uint64_t seed_;
  std::vector<std::size_t> pool_;
  std::vector<std::size_t> epoch_order_;
  std::size_t cursor_ = 0;
  std::size_t batch_size_;
  std::size_t max_batch_;
};

// ||V||_1 of the elementwise sample variance
//   V = 1/(m-1) sum_{i in batch} (grad f_i(x) - g)^2,
// where g is the batch gradient at x. Requires |batch| >= 2.
double sample_variance_l1(const FiniteSumProblem& problem, BatchView batch, const Vec& x,
                          const Vec& g);

// True iff var_l1 / m <= gnorm_sq / sigma^2.
bool norm_test(double var_l1, std::size_t m, double sigma, double gnorm_sq);

// min(ceil(sigma^2 var_l1 / gnorm_sq), m_max), at least 1. The returned size
// always satisfies norm_test on the same statistics unless it hit the cap.
std::size_t adaptive_batch_size(double sigma, double var_l1, double gnorm_sq,
                                std::size_t m_max);

}  // namespace stochopt
