#include "icltemp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "icltemp/attention.hpp"
#include "icltemp/generalization.hpp"
#include "icltemp/random_instances.hpp"
#include "icltemp/rng.hpp"
#include "icltemp/types.hpp"

namespace icltemp {

OracleOutcome oracle_moments(long n_draws, std::uint64_t seed) {
  constexpr Index d = 3;
  constexpr long n_vectors = 3;  // S averages n_vectors outer products
  RandomEngine engine(RngStream{seed, 0x6d6f6d656e7473ull});

  const Matrix sigma = random_psd(d, 0.5, 2.0, engine);
  Matrix a(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) a(i, j) = engine.normal();
  }
  const Matrix expected = moment_sandwich(n_vectors, n_vectors, sigma, a);

  // Brute force: draw S = (1/n) sum x x^T directly and average S A S.
  const Eigen::LLT<Matrix> llt(sigma);
  const Matrix chol = llt.matrixL();
  Matrix mean = Matrix::Zero(d, d);
  Matrix m2 = Matrix::Zero(d, d);  // running sum of squared deviations
  Vector z(d);
  for (long it = 1; it <= n_draws; ++it) {
    Matrix s = Matrix::Zero(d, d);
    for (long k = 0; k < n_vectors; ++k) {
      for (Index i = 0; i < d; ++i) z(i) = engine.normal();
      const Vector x = chol * z;
      s += x * x.transpose();
    }
    s /= static_cast<double>(n_vectors);
    const Matrix sample = s * a * s;
    const Matrix delta = sample - mean;
    mean += delta / static_cast<double>(it);
    m2 += delta.cwiseProduct(sample - mean);
  }
  const Matrix se =
      (m2 / static_cast<double>(n_draws - 1)).cwiseSqrt() /
      std::sqrt(static_cast<double>(n_draws));

  const double worst =
      ((mean - expected).cwiseAbs().cwiseQuotient(se)).maxCoeff();

  // Exact identity substitution: n = divisor = l gives (1 + (1+d)/l) I.
  constexpr long l = 7;
  const Matrix identity_case =
      moment_sandwich(l, l, Matrix::Identity(d, d), Matrix::Identity(d, d));
  const double identity_gap =
      (identity_case - (1.0 + (1.0 + d) / static_cast<double>(l)) *
                           Matrix::Identity(d, d))
          .cwiseAbs()
          .maxCoeff();

  OracleOutcome out;
  out.name = "moments";
  out.pass = worst <= 4.0 && identity_gap <= 1e-12;
  out.measured = worst;
  std::ostringstream detail;
  detail << "max |mc - closed form| = " << worst
         << " standard errors (bound 4); identity-case gap = " << identity_gap;
  out.detail = detail.str();
  return out;
}

OracleOutcome oracle_taylor(long trials, std::uint64_t seed) {
  RandomEngine engine(RngStream{seed, 0x7461796c6f72ull});
  double worst_ratio = 0.0;
  double worst_sum_gap = 0.0;
  bool pass = true;
  for (long t = 0; t < trials; ++t) {
    const Index l = 2 + static_cast<Index>(engine.uniform01() * 63);
    const double tau = 0.5 + 3.5 * engine.uniform01();
    Vector z(l);
    for (Index i = 0; i < l; ++i) {
      z(i) = tau * 0.1 * (2.0 * engine.uniform01() - 1.0);
    }
    const Vector soft = softmax_map(z, tau);
    const Vector lin = linearized_softmax_map(z, tau);
    const double u_inf = (z / tau).cwiseAbs().maxCoeff();
    const double gap = (soft - lin).cwiseAbs().maxCoeff();
    const double bound = 0.5 * u_inf * u_inf + 1e-9;
    worst_ratio = std::max(worst_ratio, gap / bound);
    worst_sum_gap = std::max(worst_sum_gap, std::abs(lin.sum() - 1.0));
    if (gap > bound || std::abs(lin.sum() - 1.0) > 1e-12) pass = false;
  }
  OracleOutcome out;
  out.name = "taylor";
  out.pass = pass;
  out.measured = worst_ratio;
  std::ostringstream detail;
  detail << "worst gap/bound = " << worst_ratio
         << "; worst |sum - 1| = " << worst_sum_gap;
  out.detail = detail.str();
  return out;
}

OracleOutcome oracle_argmin(long trials, std::uint64_t seed) {
  constexpr Index d = 8;
  constexpr Index l = 32;
  RandomEngine engine(RngStream{seed, 0x6172676d696eull});

  double worst_excess = 0.0;
  long checked = 0;
  bool pass = true;
  long attempts = 0;
  while (checked < trials && attempts < trials * 20) {
    ++attempts;
    const DataDistribution dist = random_data_distribution(d, engine);
    const AttentionParams params = random_compliant_params(d, l, 1.0, engine);
    const ErrorCurve curve = error_curve(params, make_test_environment(dist, l));
    const TauResult opt = optimal_temperature(curve);
    if (!opt.defined()) continue;
    ++checked;

    double grid_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 400; ++k) {
      const double tau = std::pow(10.0, -2.0 + 4.0 * k / 399.0);
      grid_min = std::min(grid_min, curve(tau));
    }
    const double at_opt = curve(*opt.value);
    const double excess = at_opt - grid_min - 1e-9 * std::abs(at_opt);
    worst_excess = std::max(worst_excess, excess);
    if (excess > 0.0) pass = false;
  }
  OracleOutcome out;
  out.name = "argmin";
  out.pass = pass && checked == trials;
  out.measured = worst_excess;
  std::ostringstream detail;
  detail << checked << "/" << trials
         << " defined curves; worst G(tau_opt) - grid min = " << worst_excess;
  out.detail = detail.str();
  return out;
}

}  // namespace icltemp
