#pragma once

#include "icltemp/prompt.hpp"
#include "icltemp/types.hpp"

namespace icltemp {

struct RidgePrior {
  Vector mu0;       // prior mean of the task vector
  Matrix sigma0;    // prior covariance, must be invertible after jitter
  double noise_var = 0.0;  // label-noise variance; floored at 1e-12 in solves

  [[nodiscard]] Index dim() const { return mu0.size(); }
};

// Posterior mean of w given pre-centered observations (xbar, ybar):
//   (xbar^T xbar / sigma^2 + Sigma0^{-1}) w = xbar^T ybar / sigma^2
//                                             + Sigma0^{-1} mu0,
// solved with symmetric factorizations, never an explicit inverse of the
// system matrix.
Vector ridge_posterior_mean(const Matrix& xbar, const Vector& ybar,
                            const RidgePrior& prior);

// Posterior mean computed from a prompt.  The l-1 labelled pairs are centered
// by their own sample means (divisor l-1), which keeps the estimator
// translation invariant.
Vector bayes_estimate(const Prompt& prompt, const RidgePrior& prior);

// Prediction for the prompt query: w_hat^T (x_l - xbar_mean) + ybar_mean.
double bayes_predict(const Prompt& prompt, const RidgePrior& prior);

// Prior with a cached Sigma0 solve for repeated per-prompt use.
class RidgeSolver {
 public:
  explicit RidgeSolver(const RidgePrior& prior);

  [[nodiscard]] Vector estimate(const Prompt& prompt) const;
  [[nodiscard]] double predict(const Prompt& prompt) const;
  [[nodiscard]] const RidgePrior& prior() const { return prior_; }

 private:
  RidgePrior prior_;
  Matrix sigma0_inv_;
  Vector sigma0_inv_mu0_;
};

}  // namespace icltemp
