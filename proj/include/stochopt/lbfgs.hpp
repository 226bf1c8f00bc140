#pragma once

#include <cstddef>
#include <deque>

#include "stochopt/types.hpp"

namespace stochopt {

// Damped limited-memory BFGS with certified eigenvalue bounds.
//
// The inverse-Hessian approximation is
//   H = V_p ... V_1 H0 V_1^T ... V_p^T + (rank-one terms),
//   V_i = I - rho_i s_i yhat_i^T,  rho_i = 1 / s_i^T yhat_i,
// built from damped pairs (s_i, yhat_i), oldest first, with
// H0 = (1 / scaling) I.

// theta = 1 if sTy >= eta sTB0s, else (1 - eta) sTB0s / (sTB0s - sTy).
double damping_theta(double s_dot_y, double s_b0_s, double eta);

struct DampedY {
  Vec y_hat;
  double theta = 1.0;
};

// yhat = theta y + (1 - theta) scaling s, with B0 = scaling * I.
DampedY damped_y(const Vec& y, const Vec& s, double scaling, double eta);

// clamp(yTy / sTy, gamma_under, gamma_over); gamma_over when sTy <= 0.
double update_scaling(const Vec& s, const Vec& y, double gamma_under, double gamma_over);

// ||y|| / ||s||, the local estimate of the gradient Lipschitz constant.
double estimate_lipschitz(const Vec& s, const Vec& y);

struct EigenBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Spectrum enclosure for A = mu V V^T + rho s s^T (V = I - rho s y^T) given
// s^T y >= gamma ||s||^2 and ||y|| <= l_y ||s||.
EigenBounds lemma3_bounds(double mu, double gamma, double l_y);

struct CurvaturePair {
  Vec s;
  Vec y;      // raw gradient difference
  Vec y_hat;  // damped
  double rho_hat = 0.0;
  double theta = 1.0;
  double scaling = 1.0;          // B0 scale in force when the pair was pushed
  double lipschitz_ratio = 0.0;  // ||y|| / ||s||
};

struct LbfgsConfig {
  std::size_t memory = 10;
  double eta = 0.25;
  double gamma_under = 0.1;
  double gamma_over = 1e5;
  double initial_scaling = 1.0;  // H0 = I before the first pair
};

class LbfgsMemory {
 public:
  explicit LbfgsMemory(LbfgsConfig config);

  // Updates the scaling from (s, y), damps y against B0 = scaling * I and
  // stores the pair, evicting the oldest beyond capacity. Returns false and
  // changes nothing when s == 0 or the capacity is zero.
  bool push(const Vec& s, const Vec& y);

  // d = -H g via the two-loop recursion.
  Vec apply(const Vec& g) const;

  // Recursive enclosure [lower, upper] of the spectrum of H, one step per
  // stored pair, oldest first, assuming every stored ||y_i|| / ||s_i|| is at
  // most lipschitz_estimate. Empty memory gives (1/scaling, 1/scaling).
  EigenBounds bounds(double lipschitz_estimate) const;

  // max_i ||y_i|| / ||s_i|| over the stored pairs (0 when empty).
  double lipschitz_estimate() const;

  // Drops every pair except the newest.
  void retain_newest();

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  std::size_t capacity() const { return config_.memory; }
  double scaling() const { return scaling_; }
  const LbfgsConfig& config() const { return config_; }
  const std::deque<CurvaturePair>& pairs() const { return pairs_; }

 private:
  LbfgsConfig config_;
  double scaling_;
  std::deque<CurvaturePair> pairs_;
};

struct EnforceResult {
  EigenBounds bounds;
  bool flushed = false;
};

// If the bounds leave [lambda_min, lambda_max], keep only the newest pair and
// recompute. Empty memory is left alone.
EnforceResult enforce_bounds(LbfgsMemory& memory, double lambda_min, double lambda_max);

}  // namespace stochopt
