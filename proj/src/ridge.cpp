#include "icltemp/ridge.hpp"

#include <stdexcept>

#include "icltemp/spd.hpp"

namespace icltemp {

namespace {

constexpr double kNoiseFloor = 1e-12;

struct CenteredPrompt {
  Matrix xbar;
  Vector ybar;
  Vector x_mean;
  double y_mean;
};

CenteredPrompt center_labelled_pairs(const Prompt& prompt) {
  const Index l = prompt.context_size();
  if (l < 2) {
    throw std::invalid_argument("bayes: prompt needs at least one labelled pair");
  }
  CenteredPrompt c;
  const auto labelled = prompt.inputs.topRows(l - 1);
  c.x_mean = labelled.colwise().mean().transpose();
  c.y_mean = prompt.labels.mean();
  c.xbar = labelled.rowwise() - c.x_mean.transpose();
  c.ybar = prompt.labels.array() - c.y_mean;
  return c;
}

Vector posterior_mean_impl(const Matrix& xbar, const Vector& ybar,
                           const Matrix& sigma0_inv,
                           const Vector& sigma0_inv_mu0, double noise_var) {
  const double sigma2 = std::max(noise_var, kNoiseFloor);
  Matrix system = sigma0_inv;
  system.selfadjointView<Eigen::Lower>().rankUpdate(xbar.transpose(),
                                                    1.0 / sigma2);
  system.triangularView<Eigen::StrictlyUpper>() =
      system.transpose().triangularView<Eigen::StrictlyUpper>();
  const Vector rhs = xbar.transpose() * ybar / sigma2 + sigma0_inv_mu0;
  return spd_solve(system, rhs, "ridge posterior");
}

}  // namespace

Vector ridge_posterior_mean(const Matrix& xbar, const Vector& ybar,
                            const RidgePrior& prior) {
  if (xbar.cols() != prior.dim() || xbar.rows() != ybar.size()) {
    throw std::invalid_argument("ridge: observation dimension mismatch");
  }
  const Matrix sigma0_inv = spd_inverse(prior.sigma0, "ridge prior");
  return posterior_mean_impl(xbar, ybar, sigma0_inv, sigma0_inv * prior.mu0,
                             prior.noise_var);
}

RidgeSolver::RidgeSolver(const RidgePrior& prior)
    : prior_(prior),
      sigma0_inv_(spd_inverse(prior.sigma0, "ridge prior")),
      sigma0_inv_mu0_(sigma0_inv_ * prior.mu0) {
  if (prior.sigma0.rows() != prior.dim() ||
      prior.sigma0.cols() != prior.dim()) {
    throw std::invalid_argument("ridge prior: dimension mismatch");
  }
}

Vector RidgeSolver::estimate(const Prompt& prompt) const {
  const CenteredPrompt c = center_labelled_pairs(prompt);
  return posterior_mean_impl(c.xbar, c.ybar, sigma0_inv_, sigma0_inv_mu0_,
                             prior_.noise_var);
}

double RidgeSolver::predict(const Prompt& prompt) const {
  const CenteredPrompt c = center_labelled_pairs(prompt);
  const Vector w = posterior_mean_impl(c.xbar, c.ybar, sigma0_inv_,
                                       sigma0_inv_mu0_, prior_.noise_var);
  return w.dot(prompt.query() - c.x_mean) + c.y_mean;
}

Vector bayes_estimate(const Prompt& prompt, const RidgePrior& prior) {
  return RidgeSolver(prior).estimate(prompt);
}

double bayes_predict(const Prompt& prompt, const RidgePrior& prior) {
  return RidgeSolver(prior).predict(prompt);
}

}  // namespace icltemp
