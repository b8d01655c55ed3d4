#include "icltemp/random_instances.hpp"

namespace icltemp {

Matrix random_orthogonal(Index d, RandomEngine& engine) {
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) g(i, j) = engine.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(d, d);
}

Matrix random_psd(Index d, double lo, double hi, RandomEngine& engine) {
  const Matrix q = random_orthogonal(d, engine);
  Vector lambda(d);
  for (Index i = 0; i < d; ++i) {
    lambda(i) = lo + (hi - lo) * engine.uniform01();
  }
  return q * lambda.asDiagonal() * q.transpose();
}

GaussianSpec random_gaussian_spec(Index d, double mean_scale, double lo,
                                  double hi, RandomEngine& engine) {
  GaussianSpec spec;
  spec.mean.resize(d);
  for (Index i = 0; i < d; ++i) spec.mean(i) = mean_scale * engine.normal();
  spec.covariance = random_psd(d, lo, hi, engine);
  return spec;
}

DataDistribution random_data_distribution(Index d, RandomEngine& engine) {
  DataDistribution dist;
  dist.x_spec = random_gaussian_spec(d, 0.1, 0.5, 2.0, engine);
  dist.task.w_spec = random_gaussian_spec(d, 0.1, 0.5, 2.0, engine);
  dist.noise.sigma2 = 0.25 * engine.uniform01();
  return dist;
}

AttentionParams random_compliant_params(Index d, Index l, double c,
                                        RandomEngine& engine) {
  const double dd = static_cast<double>(d);
  const double ll = static_cast<double>(l);

  Matrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) g(i, j) = engine.normal();
  }
  const double spectral = g.jacobiSvd().singularValues()(0);

  AttentionParams params;
  const double m_scale = 0.3 + 0.7 * engine.uniform01();
  params.m11 = (c * dd * m_scale / spectral) * g;
  params.m21 = Vector::Zero(d);

  Vector dir(d);
  for (Index i = 0; i < d; ++i) dir(i) = engine.normal();
  dir.normalize();
  params.v21 = (c / (dd * ll)) * engine.uniform01() * dir;
  params.v22 = (c / dd) * (0.3 + 0.7 * engine.uniform01());
  params.tau = 0.5 + 1.5 * engine.uniform01();
  return params;
}

}  // namespace icltemp
