#pragma once

#include <optional>
#include <string>

#include "icltemp/attention.hpp"
#include "icltemp/prompt.hpp"
#include "icltemp/types.hpp"

namespace icltemp {

// Second-moment description of a test-time distribution:
//   A = Sigma_x + mu_x mu_x^T,  B = Sigma_w + mu_w mu_w^T.
// Built from a DataDistribution rather than assembled by hand.
struct TestEnvironment {
  Matrix a;
  Matrix b;
  double sigma2 = 0.0;
  Vector mu_w;
  Matrix sigma_x;
  Index l = 0;
};

TestEnvironment make_test_environment(const DataDistribution& dist, Index l);

// E[S A S] for S = (1/divisor) sum_{i=1}^{n} x_i x_i^T with x ~ N(0, Sigma):
//   (n(n-1)/divisor^2) Sigma A Sigma
//   + (n/divisor^2) (Sigma A Sigma + Sigma A^T Sigma + Tr(A Sigma) Sigma).
// With n = divisor = l this collapses to
//   Sigma A Sigma + (1/l) Sigma A^T Sigma + (1/l) Tr(A Sigma) Sigma.
Matrix moment_sandwich(long n, long divisor, const Matrix& sigma,
                       const Matrix& a);

// Closed-form prediction error of the linearized layer as a function of the
// temperature: G(tau) = a/tau^2 - b/tau + c with
//   a = Tr(A M11^T F1 M11)
//   b = Tr(A (F2 M11 + M11^T F2^T))
//   c = Tr(A B) + sigma^2
//   Bhat = v22 mu_w v21^T + v22 v21 mu_w^T + v22^2 B
//   F1 = (Sigma_x Bhat + (1/l)(v22^2 sigma^2 + Tr(Bhat Sigma_x)) I) Sigma_x
//   F2 = (mu_w v21^T + v22 B) Sigma_x.
// The formula is an asymptotic in l; finite-size gaps are quantified by the
// Monte Carlo suites rather than corrected here.
struct ErrorCurve {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  [[nodiscard]] double operator()(double tau) const {
    return a / (tau * tau) - b / tau + c;
  }
};

ErrorCurve error_curve(const AttentionParams& params,
                       const TestEnvironment& env);

double generalization_error(const AttentionParams& params,
                            const TestEnvironment& env);

// An undefined temperature is a value, not an error, so scenario sweeps can
// skip and carry on.
struct TauResult {
  std::optional<double> value;
  std::string reason;  // set when undefined

  [[nodiscard]] bool defined() const { return value.has_value(); }
};

// 2a/b when both curve coefficients are positive; at that point
// G''(2a/b) = b^4 / (8 a^3) > 0, so it is the global minimum over tau > 0.
TauResult optimal_temperature(const ErrorCurve& curve);

// Variance-to-mean ratio of the pre-softmax scores,
//   scale * Tr(M11 Sigma_x M11^T Sigma_x) / Tr(Sigma_x M11),
// undefined when the denominator trace falls below 1e-9 * d.  With
// scale = 1/d an isotropic covariance mismatch by a factor c gives exactly c.
TauResult heuristic_temperature(const Matrix& m11, const Matrix& sigma_x,
                                double scale);

}  // namespace icltemp
