#include "stochopt/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace stochopt {

double damping_theta(double s_dot_y, double s_b0_s, double eta) {
  if (!(s_b0_s > 0.0)) throw std::invalid_argument("damping needs s^T B0 s > 0");
  if (s_dot_y >= eta * s_b0_s) return 1.0;
  return (1.0 - eta) * s_b0_s / (s_b0_s - s_dot_y);
}

DampedY damped_y(const Vec& y, const Vec& s, double scaling, double eta) {
  if (y.size() != s.size()) throw std::invalid_argument("s and y differ in dimension");
  const double ssq = s.squaredNorm();
  if (ssq == 0.0) throw std::invalid_argument("damping needs s != 0");
  const double theta = damping_theta(s.dot(y), scaling * ssq, eta);
  if (theta == 1.0) return {y, 1.0};
  return {theta * y + ((1.0 - theta) * scaling) * s, theta};
}

double update_scaling(const Vec& s, const Vec& y, double gamma_under, double gamma_over) {
  const double sy = s.dot(y);
  if (!(sy > 0.0)) return gamma_over;
  return std::clamp(y.squaredNorm() / sy, gamma_under, gamma_over);
}

double estimate_lipschitz(const Vec& s, const Vec& y) {
  const double sn = s.norm();
  if (sn == 0.0) throw std::invalid_argument("Lipschitz estimate needs s != 0");
  return y.norm() / sn;
}

EigenBounds lemma3_bounds(double mu, double gamma, double l_y) {
  if (!(mu > 0.0 && gamma > 0.0 && l_y > 0.0)) {
    throw std::invalid_argument("eigenvalue bounds need mu, gamma, L_y > 0");
  }
  const double shrink = mu / (1.0 + (mu / gamma) * l_y * l_y);
  EigenBounds b;
  b.lower = std::min(1.0 / l_y, shrink);
  b.upper = 1.0 / gamma + std::max(0.0, (mu / (gamma * gamma)) * l_y * l_y - shrink);
  return b;
}

LbfgsMemory::LbfgsMemory(LbfgsConfig config) : config_(config), scaling_(config.initial_scaling) {
  if (!(config_.eta > 0.0 && config_.eta < 1.0)) throw std::invalid_argument("need 0 < eta < 1");
  if (!(config_.gamma_under > 0.0 && config_.gamma_under < config_.gamma_over)) {
    throw std::invalid_argument("need 0 < gamma_under < gamma_over");
  }
  if (!(scaling_ > 0.0)) throw std::invalid_argument("initial scaling must be > 0");
}

bool LbfgsMemory::push(const Vec& s, const Vec& y) {
  if (config_.memory == 0) return false;
  if (s.size() != y.size()) throw std::invalid_argument("s and y differ in dimension");
  const double ssq = s.squaredNorm();
  if (ssq == 0.0) return false;
  if (!s.allFinite() || !y.allFinite()) throw std::domain_error("curvature pair is not finite");

  scaling_ = update_scaling(s, y, config_.gamma_under, config_.gamma_over);
  DampedY damped = damped_y(y, s, scaling_, config_.eta);

  // The damped formula meets the curvature threshold exactly in real
  // arithmetic; push out any shortfall left by rounding.
  const double threshold = config_.eta * scaling_ * ssq;
  for (int guard = 0; guard < 8; ++guard) {
    const double deficit = threshold - s.dot(damped.y_hat);
    if (deficit <= 0.0) break;
    damped.y_hat += (2.0 * deficit / ssq) * s;
  }
  const double sy_hat = s.dot(damped.y_hat);
  if (!(sy_hat >= threshold && sy_hat > 0.0)) {
    throw std::logic_error("damped pair violates the curvature condition");
  }

  CurvaturePair pair;
  pair.s = s;
  pair.y = y;
  pair.y_hat = std::move(damped.y_hat);
  pair.rho_hat = 1.0 / sy_hat;
  pair.theta = damped.theta;
  pair.scaling = scaling_;
  pair.lipschitz_ratio = std::sqrt(y.squaredNorm() / ssq);
  pairs_.push_back(std::move(pair));
  while (pairs_.size() > config_.memory) pairs_.pop_front();
  return true;
}

Vec LbfgsMemory::apply(const Vec& g) const {
  Vec q = g;
  std::vector<double> alpha(pairs_.size());
  for (std::size_t j = pairs_.size(); j-- > 0;) {
    const auto& p = pairs_[j];
    alpha[j] = p.rho_hat * p.s.dot(q);
    q.noalias() -= alpha[j] * p.y_hat;
  }
  Vec r = q / scaling_;
  for (std::size_t j = 0; j < pairs_.size(); ++j) {
    const auto& p = pairs_[j];
    const double beta = p.rho_hat * p.y_hat.dot(r);
    r.noalias() += (alpha[j] - beta) * p.s;
  }
  return -r;
}

EigenBounds LbfgsMemory::bounds(double lipschitz_estimate) const {
  double lower = 1.0 / scaling_;
  double upper = lower;
  for (const auto& p : pairs_) {
    // For this pair: s^T yhat >= (eta * scaling) ||s||^2 and
    // ||yhat|| <= (L_g + scaling) ||s||.
    const double gamma = config_.eta * p.scaling;
    const double l = lipschitz_estimate + p.scaling;
    const double l2 = l * l;
    const double next_lower = std::min(1.0 / l, lower / (1.0 + (lower / gamma) * l2));
    const double next_upper =
        1.0 / gamma +
        std::max(0.0, upper * l2 / (gamma * gamma) - lower / (1.0 + (upper / gamma) * l2));
    lower = next_lower;
    upper = next_upper;
  }
  return {lower, upper};
}

double LbfgsMemory::lipschitz_estimate() const {
  double best = 0.0;
  for (const auto& p : pairs_) best = std::max(best, p.lipschitz_ratio);
  return best;
}

void LbfgsMemory::retain_newest() {
  while (pairs_.size() > 1) pairs_.pop_front();
}

EnforceResult enforce_bounds(LbfgsMemory& memory, double lambda_min, double lambda_max) {
  EnforceResult result;
  result.bounds = memory.bounds(memory.lipschitz_estimate());
  if (memory.empty()) return result;
  if (result.bounds.upper > lambda_max || result.bounds.lower < lambda_min) {
    memory.retain_newest();
    result.bounds = memory.bounds(memory.lipschitz_estimate());
    result.flushed = true;
  }
  return result;
}

}  // namespace stochopt
