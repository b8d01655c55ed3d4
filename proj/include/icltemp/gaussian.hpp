#pragma once

#include "icltemp/rng.hpp"
#include "icltemp/types.hpp"

namespace icltemp {

// Advisory bounds on a distribution: mean norm at most c1, covariance
// spectrum inside [c2, c3].  Defaults are library conventions and may be
// overridden by the caller.
struct ValidationBounds {
  double c1 = 10.0;
  double c2 = 1e-3;
  double c3 = 1e3;
};

struct GaussianSpec {
  Vector mean;
  Matrix covariance;

  [[nodiscard]] Index dim() const { return mean.size(); }

  static GaussianSpec isotropic(Index d, double variance = 1.0,
                                double mean_value = 0.0);
};

struct NoiseSpec {
  double sigma2 = 0.0;  // label-noise variance, must be >= 0
};

// Throws std::invalid_argument naming the violated constraint (dimensions,
// symmetry, c1, c2, c3).  Eigenvalue extremes come from a full symmetric
// eigensolve, accurate well past the 1e-8 relative tolerance promised here.
void validate_spec(const GaussianSpec& spec, const ValidationBounds& bounds);

// Cholesky-type factor of a symmetrized PSD matrix: a matrix L with
// L L^T = (S + S^T)/2 up to roundoff.  Uses a pivoted LDL^T factorization;
// if the diagonal comes out materially negative, jitter of
// 1e-12 * trace/d is added to the diagonal up to three times before
// giving up with std::runtime_error.
class CovarianceFactor {
 public:
  explicit CovarianceFactor(const Matrix& covariance);

  [[nodiscard]] const Matrix& matrix_l() const { return l_; }
  [[nodiscard]] Index dim() const { return l_.rows(); }

 private:
  Matrix l_;
};

// n i.i.d. rows from N(mean, covariance), generated as mean + L z with z
// standard normal.  Row i consumes draws i*d .. i*d+d-1 of the stream, so the
// output is a pure function of (spec, n, rng).
Matrix sample(const GaussianSpec& spec, Index n, RngStream rng);

// Same contract as sample(), reusing a precomputed factor (hot paths).
Matrix sample_with_factor(const Vector& mean, const CovarianceFactor& factor,
                          Index n, RngStream rng);

}  // namespace icltemp
