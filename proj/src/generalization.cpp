#include "icltemp/generalization.hpp"

#include <stdexcept>

namespace icltemp {

TestEnvironment make_test_environment(const DataDistribution& dist, Index l) {
  if (l < 2) {
    throw std::invalid_argument("test environment: l must be >= 2");
  }
  const GaussianSpec& x = dist.x_spec;
  const GaussianSpec& w = dist.task.w_spec;
  if (x.dim() != w.dim()) {
    throw std::invalid_argument("test environment: dimension mismatch");
  }
  TestEnvironment env;
  env.a = x.covariance + x.mean * x.mean.transpose();
  env.b = w.covariance + w.mean * w.mean.transpose();
  env.sigma2 = dist.noise.sigma2;
  env.mu_w = w.mean;
  env.sigma_x = x.covariance;
  env.l = l;
  return env;
}

Matrix moment_sandwich(long n, long divisor, const Matrix& sigma,
                       const Matrix& a) {
  if (n < 1 || divisor < 1) {
    throw std::invalid_argument("moment_sandwich: n and divisor must be >= 1");
  }
  const Index d = sigma.rows();
  if (sigma.cols() != d || a.rows() != d || a.cols() != d) {
    throw std::invalid_argument("moment_sandwich: dimension mismatch");
  }
  const double div2 = static_cast<double>(divisor) * static_cast<double>(divisor);
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / div2;
  const double diag = static_cast<double>(n) / div2;

  const Matrix sas = sigma * a * sigma;
  const Matrix sats = sigma * a.transpose() * sigma;
  return pairs * sas + diag * (sas + sats + (a * sigma).trace() * sigma);
}

namespace {

void require_env(const AttentionParams& params, const TestEnvironment& env) {
  const Index d = params.dim();
  if (env.a.rows() != d || env.b.rows() != d || env.sigma_x.rows() != d ||
      env.mu_w.size() != d) {
    throw std::invalid_argument("generalization: params/environment dimension mismatch");
  }
  if (env.l < 2) {
    throw std::invalid_argument("generalization: environment l must be >= 2");
  }
}

}  // namespace

ErrorCurve error_curve(const AttentionParams& params,
                       const TestEnvironment& env) {
  require_env(params, env);
  const double v22 = params.v22;
  const double inv_l = 1.0 / static_cast<double>(env.l);

  const Matrix mu_v = env.mu_w * params.v21.transpose();
  const Matrix b_hat =
      v22 * mu_v + v22 * mu_v.transpose() + v22 * v22 * env.b;
  const Matrix f1 =
      (env.sigma_x * b_hat +
       inv_l * (v22 * v22 * env.sigma2 + (b_hat * env.sigma_x).trace()) *
           Matrix::Identity(env.a.rows(), env.a.cols())) *
      env.sigma_x;
  const Matrix f2 = (mu_v + v22 * env.b) * env.sigma_x;
  const Matrix f2m = f2 * params.m11;

  ErrorCurve curve;
  curve.a = (env.a * params.m11.transpose() * f1 * params.m11).trace();
  curve.b = (env.a * (f2m + f2m.transpose())).trace();
  curve.c = (env.a * env.b).trace() + env.sigma2;
  return curve;
}

double generalization_error(const AttentionParams& params,
                            const TestEnvironment& env) {
  return error_curve(params, env)(params.tau);
}

TauResult optimal_temperature(const ErrorCurve& curve) {
  TauResult result;
  if (!(curve.a > 0.0)) {
    result.reason = "a <= 0";
    return result;
  }
  if (!(curve.b > 0.0)) {
    result.reason = "b <= 0";
    return result;
  }
  result.value = 2.0 * curve.a / curve.b;
  return result;
}

TauResult heuristic_temperature(const Matrix& m11, const Matrix& sigma_x,
                                double scale) {
  const Index d = m11.rows();
  if (m11.cols() != d || sigma_x.rows() != d || sigma_x.cols() != d) {
    throw std::invalid_argument("heuristic_temperature: dimension mismatch");
  }
  const double eps = 1e-9 * static_cast<double>(d);
  const double first_moment = (sigma_x * m11).trace();
  TauResult result;
  if (first_moment < eps) {
    result.reason = "degenerate denominator";
    return result;
  }
  const double second_moment =
      (m11 * sigma_x * m11.transpose() * sigma_x).trace();
  result.value = scale * second_moment / std::max(first_moment, eps);
  return result;
}

}  // namespace icltemp
