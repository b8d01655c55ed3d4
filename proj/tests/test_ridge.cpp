#include <cmath>
#include <limits>

#include <doctest.h>

#include "icltemp/harness.hpp"
#include "icltemp/random_instances.hpp"
#include "icltemp/ridge.hpp"
#include "icltemp/spd.hpp"
#include "test_support.hpp"

using namespace icltemp;
using test::isotropic_distribution;
using test::make_prompt;

namespace {

RidgePrior standard_prior(Index d, double noise_var) {
  RidgePrior prior;
  prior.mu0 = Vector::Zero(d);
  prior.sigma0 = Matrix::Identity(d, d);
  prior.noise_var = noise_var;
  return prior;
}

Vector ols_fit(const Matrix& xbar, const Vector& ybar) {
  return xbar.colPivHouseholderQr().solve(ybar);
}

}  // namespace

TEST_CASE("scalar posterior mean, worked example") {
  Matrix xbar(1, 1);
  xbar << 1.0;
  Vector ybar(1);
  ybar << 2.0;
  const Vector w = ridge_posterior_mean(xbar, ybar, standard_prior(1, 1.0));
  CHECK(w(0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("uninformative data returns the prior mean") {
  Matrix inputs(5, 3);
  inputs.rowwise() = Vector::LinSpaced(3, 1.0, 3.0).transpose();
  RidgePrior prior = standard_prior(3, 0.5);
  prior.mu0 << 0.3, -0.7, 1.1;
  const Vector w = bayes_estimate(make_prompt(inputs, Vector::Ones(4)), prior);
  CHECK((w - prior.mu0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("flat prior recovers least squares") {
  const DataDistribution dist = isotropic_distribution(10, 1.0);
  const Prompt p = sample_prompt(dist, 201, RngStream{41, 0});

  RidgePrior prior = standard_prior(10, 1.0);
  prior.sigma0 *= 1e8;
  const Vector ridge = bayes_estimate(p, prior);

  const Matrix labelled = p.inputs.topRows(200);
  const Vector x_mean = labelled.colwise().mean().transpose();
  const Matrix xbar = labelled.rowwise() - x_mean.transpose();
  const Vector ybar = p.labels.array() - p.labels.mean();
  const Vector ols = ols_fit(xbar, ybar);
  CHECK((ridge - ols).norm() <= 1e-4 * ols.norm());
}

TEST_CASE("noiseless interpolation recovers the task") {
  const DataDistribution dist = isotropic_distribution(8, 0.0);
  const Prompt p = sample_prompt(dist, 30, RngStream{43, 0});
  const RidgePrior prior = standard_prior(8, 0.0);  // floored internally
  CHECK(std::abs(bayes_predict(p, prior) - p.true_query_label) <= 1e-6);
}

TEST_CASE("all-zero labels predict zero") {
  const Matrix inputs = sample(GaussianSpec::isotropic(4), 9, RngStream{44, 0});
  const Prompt p = make_prompt(inputs, Vector::Zero(8));
  CHECK(std::abs(bayes_predict(p, standard_prior(4, 0.2))) < 1e-12);
}

TEST_CASE("ridge shrinks toward the prior mean") {
  RandomEngine engine(RngStream{45, 0});
  const DataDistribution dist = isotropic_distribution(6, 0.49);
  for (int trial = 0; trial < 20; ++trial) {
    const Prompt p = sample_prompt(dist, 41, RngStream{46, 0}.child(trial));
    RidgePrior prior = standard_prior(6, 0.49);
    prior.sigma0 *= 0.5 + 2.0 * engine.uniform01();
    for (Index i = 0; i < 6; ++i) prior.mu0(i) = 0.3 * engine.normal();

    const Vector ridge = bayes_estimate(p, prior);
    const Matrix labelled = p.inputs.topRows(40);
    const Vector x_mean = labelled.colwise().mean().transpose();
    const Matrix xbar = labelled.rowwise() - x_mean.transpose();
    const Vector ybar = p.labels.array() - p.labels.mean();
    const Vector ols = ols_fit(xbar, ybar);
    CHECK((ridge - prior.mu0).norm() <= (ols - prior.mu0).norm() + 1e-9);
  }
}

TEST_CASE("posterior mean satisfies its normal equations") {
  const DataDistribution dist = isotropic_distribution(7, 0.04);
  for (int trial = 0; trial < 10; ++trial) {
    const Prompt p = sample_prompt(dist, 25, RngStream{47, 0}.child(trial));
    RidgePrior prior = standard_prior(7, 0.04);
    prior.mu0.setConstant(0.2);
    const Vector w = bayes_estimate(p, prior);

    const Matrix labelled = p.inputs.topRows(24);
    const Vector x_mean = labelled.colwise().mean().transpose();
    const Matrix xbar = labelled.rowwise() - x_mean.transpose();
    const Vector ybar = p.labels.array() - p.labels.mean();
    const Matrix sigma0_inv = spd_inverse(prior.sigma0, "test");
    const Matrix system =
        xbar.transpose() * xbar / prior.noise_var + sigma0_inv;
    const Vector rhs =
        xbar.transpose() * ybar / prior.noise_var + sigma0_inv * prior.mu0;
    CHECK((system * w - rhs).norm() <= 1e-9 * rhs.norm());
  }
}

TEST_CASE("prediction is translation invariant") {
  const DataDistribution dist = isotropic_distribution(5, 0.09);
  const RidgePrior prior = standard_prior(5, 0.09);
  for (int trial = 0; trial < 10; ++trial) {
    const Prompt p = sample_prompt(dist, 30, RngStream{48, 0}.child(trial));
    Prompt shifted = p;
    shifted.inputs.rowwise() += Vector::LinSpaced(5, -4.0, 2.0).transpose();
    const double base = bayes_predict(p, prior);
    const double moved = bayes_predict(shifted, prior);
    CHECK(std::abs(base - moved) <= 1e-9 * (1.0 + std::abs(base)));
  }
}

TEST_CASE("oracle error decreases with context length") {
  const Index d = 10;
  const DataDistribution dist = isotropic_distribution(d, 0.01);
  const RidgePrior prior = standard_prior(d, 0.01);
  double previous = std::numeric_limits<double>::infinity();
  for (Index l : {20, 80, 320}) {
    McRequest request;
    request.params = test::isotropic_params(d);
    request.taus = {1.0};
    request.bayes_prior = prior;
    const McBatch batch =
        evaluate_mc(request, dist, l, 600, RngStream{49, 0}.child(l), 0);
    CHECK(batch.bayes->mean < previous);
    previous = batch.bayes->mean;
  }
}
