#include "stochopt/sampling.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace stochopt {

Sampler::Sampler(std::size_t population, std::size_t batch_size, std::size_t max_batch,
                 std::uint64_t seed)
    : rng_(seed), seed_(seed), pool_(population), batch_size_(batch_size),
      max_batch_(max_batch) {
  if (population < 1) throw std::invalid_argument("sampler population must be positive");
  if (max_batch < 1 || max_batch > population) {
    throw std::invalid_argument("m_max must lie in [1, N]");
  }
  if (batch_size < 1 || batch_size > max_batch) {
    throw std::invalid_argument("batch size must lie in [1, m_max]");
  }
  std::iota(pool_.begin(), pool_.end(), std::size_t{0});
  epoch_order_ = pool_;
  cursor_ = epoch_order_.size();
}

void Sampler::set_batch_size(std::size_t m) {
  if (m < 1 || m > max_batch_) {
    throw std::invalid_argument("batch size " + std::to_string(m) + " outside [1, " +
                                std::to_string(max_batch_) + "]");
  }
  batch_size_ = m;
}

Batch Sampler::draw(std::size_t m) {
  const std::size_t n = pool_.size();
  if (m < 1 || m > n) {
    throw std::invalid_argument("cannot draw " + std::to_string(m) + " of " +
                                std::to_string(n) + " samples");
  }
  // Partial Fisher-Yates: the first m slots become a uniform m-subset
  // whatever order the pool was left in by earlier draws.
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t r = j + rng_.below(n - j);
    std::swap(pool_[j], pool_[r]);
  }
  return Batch(pool_.begin(), pool_.begin() + static_cast<std::ptrdiff_t>(m));
}

void Sampler::start_epoch() {
  std::iota(epoch_order_.begin(), epoch_order_.end(), std::size_t{0});
  for (std::size_t j = epoch_order_.size(); j > 1; --j) {
    const std::size_t r = rng_.below(j);
    std::swap(epoch_order_[j - 1], epoch_order_[r]);
  }
  cursor_ = 0;
}

Batch Sampler::next_in_epoch(std::size_t m) {
  if (m < 1 || m > remaining_in_epoch()) {
    throw std::invalid_argument("epoch batch of " + std::to_string(m) + " exceeds the " +
                                std::to_string(remaining_in_epoch()) + " samples left");
  }
  const auto first = epoch_order_.begin() + static_cast<std::ptrdiff_t>(cursor_);
  cursor_ += m;
  return Batch(first, first + static_cast<std::ptrdiff_t>(m));
}

double sample_variance_l1(const FiniteSumProblem& problem, BatchView batch, const Vec& x,
                          const Vec& g) {
  if (batch.size() < 2) throw std::invalid_argument("sample variance needs at least 2 samples");
  if (g.size() != x.size()) throw std::invalid_argument("gradient/point dimension mismatch");
  for (std::size_t i : batch) {
    if (i >= problem.size()) throw std::out_of_range("sample index out of range");
  }
  Vec acc = Vec::Zero(x.size());
  Vec gi(x.size());
  for (std::size_t i : batch) {
    problem.sample_grad_unchecked(i, x, gi);
    acc += (gi - g).cwiseAbs2();
  }
  return acc.sum() / static_cast<double>(batch.size() - 1);
}

bool norm_test(double var_l1, std::size_t m, double sigma, double gnorm_sq) {
  if (m < 1) throw std::invalid_argument("norm test needs m >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("norm test needs sigma > 0");
  return var_l1 / static_cast<double>(m) <= gnorm_sq / (sigma * sigma);
}

std::size_t adaptive_batch_size(double sigma, double var_l1, double gnorm_sq,
                                std::size_t m_max) {
  if (!(sigma > 0.0)) throw std::invalid_argument("adaptive batch size needs sigma > 0");
  if (!(gnorm_sq > 0.0)) {
    throw std::invalid_argument("adaptive batch size needs a nonzero gradient");
  }
  if (!(var_l1 >= 0.0)) throw std::invalid_argument("variance must be nonnegative");
  if (m_max < 1) throw std::invalid_argument("m_max must be positive");
  const double ratio = sigma * sigma * var_l1 / gnorm_sq;
  if (!(ratio < static_cast<double>(m_max))) return m_max;
  std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio)));
  // Absorb rounding so that the returned size passes the test it inverts.
  while (m < m_max && !norm_test(var_l1, m, sigma, gnorm_sq)) ++m;
  return std::min(m, m_max);
}

}  // namespace stochopt
