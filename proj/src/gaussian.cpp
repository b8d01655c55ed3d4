#include "icltemp/gaussian.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace icltemp {

GaussianSpec GaussianSpec::isotropic(Index d, double variance,
                                     double mean_value) {
  GaussianSpec spec;
  spec.mean = Vector::Constant(d, mean_value);
  spec.covariance = variance * Matrix::Identity(d, d);
  return spec;
}

void validate_spec(const GaussianSpec& spec, const ValidationBounds& bounds) {
  const Index d = spec.covariance.rows();
  if (spec.covariance.cols() != d) {
    throw std::invalid_argument("gaussian spec: covariance is not square");
  }
  if (spec.mean.size() != d) {
    std::ostringstream msg;
    msg << "gaussian spec: mean length " << spec.mean.size()
        << " does not match covariance dimension " << d;
    throw std::invalid_argument(msg.str());
  }
  if (!spec.mean.allFinite() || !spec.covariance.allFinite()) {
    throw std::invalid_argument("gaussian spec: non-finite entries");
  }

  const double scale = spec.covariance.cwiseAbs().maxCoeff();
  const double asym =
      (spec.covariance - spec.covariance.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "gaussian spec: covariance not symmetric (max asymmetry " << asym
        << ")";
    throw std::invalid_argument(msg.str());
  }

  const double mean_norm = spec.mean.norm();
  if (mean_norm > bounds.c1) {
    std::ostringstream msg;
    msg << "gaussian spec: c1 violated (mean norm " << mean_norm << " > "
        << bounds.c1 << ")";
    throw std::invalid_argument(msg.str());
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(
      ((spec.covariance + spec.covariance.transpose()) / 2.0).eval(),
      Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::invalid_argument("gaussian spec: eigenvalue computation failed");
  }
  const double lambda_min = es.eigenvalues().minCoeff();
  const double lambda_max = es.eigenvalues().maxCoeff();
  if (lambda_min < bounds.c2) {
    std::ostringstream msg;
    msg << "gaussian spec: c2 violated";
    if (lambda_min < 0.0) msg << " / not PSD";
    msg << " (lambda_min " << lambda_min << " < " << bounds.c2 << ")";
    throw std::invalid_argument(msg.str());
  }
  if (lambda_max > bounds.c3) {
    std::ostringstream msg;
    msg << "gaussian spec: c3 violated (lambda_max " << lambda_max << " > "
        << bounds.c3 << ")";
    throw std::invalid_argument(msg.str());
  }
}

CovarianceFactor::CovarianceFactor(const Matrix& covariance) {
  const Index d = covariance.rows();
  if (covariance.cols() != d) {
    throw std::invalid_argument("covariance factor: matrix is not square");
  }
  if (!covariance.allFinite()) {
    throw std::invalid_argument("covariance factor: non-finite entries");
  }

  const Matrix sym = (covariance + covariance.transpose()) / 2.0;
  const double jitter =
      d > 0 ? 1e-12 * sym.trace() / static_cast<double>(d) : 0.0;

  Matrix attempt = sym;
  for (int round = 0; round <= 3; ++round) {
    if (round > 0) attempt.diagonal().array() += jitter;
    Eigen::LDLT<Matrix> ldlt(attempt);
    if (ldlt.info() != Eigen::Success) continue;
    Vector dvec = ldlt.vectorD();
    const double dscale = dvec.cwiseAbs().maxCoeff();
    const double tol = 1e-12 * dscale;
    if (dvec.minCoeff() < -tol) continue;  // materially indefinite
    dvec = dvec.cwiseMax(0.0).cwiseSqrt();
    l_ = ldlt.transpositionsP().transpose() *
         Matrix(Matrix(ldlt.matrixL()) * dvec.asDiagonal());
    return;
  }
  throw std::runtime_error(
      "covariance factor: factorization failed after jitter (matrix not PSD)");
}

Matrix sample_with_factor(const Vector& mean, const CovarianceFactor& factor,
                          Index n, RngStream rng) {
  const Index d = mean.size();
  if (factor.dim() != d) {
    throw std::invalid_argument("sample: mean/factor dimension mismatch");
  }
  RandomEngine engine(rng);
  Matrix z(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) z(i, j) = engine.normal();
  }
  Matrix x(n, d);
  x.noalias() = z * factor.matrix_l().transpose();
  x.rowwise() += mean.transpose();
  return x;
}

Matrix sample(const GaussianSpec& spec, Index n, RngStream rng) {
  return sample_with_factor(spec.mean, CovarianceFactor(spec.covariance), n,
                            rng);
}

}  // namespace icltemp
