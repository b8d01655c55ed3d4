#pragma once

#include <stdexcept>
#include <string>

#include "icltemp/types.hpp"

namespace icltemp {

// Symmetric positive-definite solves with the shared jitter policy: on
// factorization trouble, add 1e-10 * trace/d to the diagonal, up to three
// times, then fail.

inline Eigen::LDLT<Matrix> spd_factor(const Matrix& m, const std::string& what) {
  const Index d = m.rows();
  const double jitter =
      d > 0 ? 1e-10 * m.trace() / static_cast<double>(d) : 0.0;
  Matrix attempt = (m + m.transpose()) / 2.0;
  for (int round = 0; round <= 3; ++round) {
    if (round > 0) attempt.diagonal().array() += jitter;
    Eigen::LDLT<Matrix> ldlt(attempt);
    if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0) {
      return ldlt;
    }
  }
  throw std::runtime_error(what + ": singular system after jitter");
}

inline Matrix spd_inverse(const Matrix& m, const std::string& what) {
  return spd_factor(m, what).solve(Matrix::Identity(m.rows(), m.rows()));
}

inline Vector spd_solve(const Matrix& m, const Vector& rhs,
                        const std::string& what) {
  return spd_factor(m, what).solve(rhs);
}

}  // namespace icltemp
