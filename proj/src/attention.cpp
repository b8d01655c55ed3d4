#include "icltemp/attention.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace icltemp {

namespace {

void require_positive_tau(double tau) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("attention: tau must be > 0");
  }
}

void require_finite(const Vector& z) {
  if (!z.allFinite()) {
    throw std::invalid_argument("attention: non-finite score vector");
  }
}

void require_dims(const Prompt& prompt, const AttentionParams& params) {
  const Index d = prompt.dim();
  if (params.m11.rows() != d || params.m11.cols() != d ||
      params.m21.size() != d || params.v21.size() != d) {
    throw std::invalid_argument("attention: prompt/params dimension mismatch");
  }
  require_positive_tau(params.tau);
}

MapSummary summarize(const Vector& v) {
  MapSummary s;
  s.mean = v.mean();
  s.variance = (v.array() - s.mean).square().sum() /
               static_cast<double>(v.size());
  s.min = v.minCoeff();
  s.max = v.maxCoeff();
  return s;
}

}  // namespace

AttentionParams AttentionParams::zero(Index d) {
  AttentionParams p;
  p.m11 = Matrix::Zero(d, d);
  p.m21 = Vector::Zero(d);
  p.v21 = Vector::Zero(d);
  p.v22 = 0.0;
  p.tau = 1.0;
  return p;
}

FullAttentionWeights full_weights_from(const AttentionParams& params) {
  const Index d = params.dim();
  FullAttentionWeights w;
  w.k = Matrix::Identity(d + 1, d + 1);
  w.q = Matrix::Zero(d + 1, d + 1);
  w.q.topLeftCorner(d, d) = params.m11;
  w.q.block(d, 0, 1, d) = params.m21.transpose();
  w.v = Matrix::Zero(d + 1, d + 1);
  w.v.block(d, 0, 1, d) = params.v21.transpose();
  w.v(d, d) = params.v22;
  w.tau = params.tau;
  return w;
}

Vector softmax_map(const Vector& z, double tau) {
  require_positive_tau(tau);
  require_finite(z);
  Vector u = z / tau;
  u.array() -= u.maxCoeff();
  Vector e = u.array().exp();
  return e / e.sum();
}

Vector linearized_softmax_map(const Vector& z, double tau) {
  require_positive_tau(tau);
  require_finite(z);
  const double l = static_cast<double>(z.size());
  const Vector u = z / tau;
  return Vector::Constant(z.size(), (1.0 - u.sum() / l) / l) + u / l;
}

Prediction predict_linearized(const Prompt& prompt,
                              const AttentionParams& params) {
  require_dims(prompt, params);
  const SummaryStats s = summary_stats(prompt);
  Prediction out;
  out.w_att = params.m11.transpose() * (s.c_xx * params.v21 + params.v22 * s.c_xy) +
              (params.v21.dot(s.c_xy) + params.v22 * s.c_yy) * params.m21;
  out.b_att = params.v21.dot(s.s_x) + params.v22 * s.s_y;
  out.y_hat = out.w_att.dot(prompt.query()) / params.tau + out.b_att;
  return out;
}

double predict_linear_attention(const Prompt& prompt,
                                const AttentionParams& params) {
  require_dims(prompt, params);
  const Index l = prompt.context_size();
  const double inv_l = 1.0 / static_cast<double>(l);

  // Raw moments, no centering: that is the whole difference to the
  // linearized layer.
  const Vector gram_v21 =
      prompt.inputs.transpose() * (prompt.inputs * params.v21) * inv_l;
  const Vector c_xy =
      prompt.inputs.topRows(l - 1).transpose() * prompt.labels * inv_l;
  const double c_yy = prompt.labels.squaredNorm() * inv_l;

  const Vector w = params.m11.transpose() * (gram_v21 + params.v22 * c_xy) +
                   (params.v21.dot(c_xy) + params.v22 * c_yy) * params.m21;
  return w.dot(prompt.query()) / params.tau;
}

Matrix embedding_matrix(const Prompt& prompt) {
  const Index l = prompt.context_size();
  const Index d = prompt.dim();
  Matrix z(d + 1, l);
  z.topRows(d) = prompt.inputs.transpose();
  z.row(d).head(l - 1) = prompt.labels.transpose();
  z(d, l - 1) = 0.0;  // the query label slot stays empty
  return z;
}

double predict_softmax_reference(const Prompt& prompt,
                                 const FullAttentionWeights& weights) {
  require_positive_tau(weights.tau);
  const Index d = prompt.dim();
  if (weights.k.rows() != d + 1 || weights.q.rows() != d + 1 ||
      weights.v.rows() != d + 1) {
    throw std::invalid_argument("attention: weights dimension mismatch");
  }
  const Matrix z = embedding_matrix(prompt);
  const Matrix scores = (weights.k * z).transpose() * (weights.q * z);
  Matrix attn(scores.rows(), scores.cols());
  for (Index j = 0; j < scores.cols(); ++j) {
    attn.col(j) = softmax_map(scores.col(j), weights.tau);
  }
  const Matrix s = z + weights.v * z * attn;
  return s(d, prompt.context_size() - 1);
}

std::vector<TemperatureEffect> histogram_compare(
    const Vector& z, const std::vector<double>& taus) {
  if (taus.empty()) {
    throw std::invalid_argument("histogram_compare: no temperatures given");
  }
  const double l = static_cast<double>(z.size());
  std::vector<TemperatureEffect> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    TemperatureEffect e;
    e.tau = tau;
    e.softmax = summarize(softmax_map(z, tau));
    e.linearized = summarize(linearized_softmax_map(z, tau));
    e.scaled = summarize(z / (l * tau));
    out.push_back(e);
  }
  return out;
}

std::vector<std::string> assumption_violations(const AttentionParams& params,
                                               double c, Index l) {
  const double d = static_cast<double>(params.dim());
  std::vector<std::string> out;
  const auto report = [&out](const char* what, double value, double limit) {
    std::ostringstream msg;
    msg << what << " = " << value << " exceeds " << limit;
    out.push_back(msg.str());
  };
  const double m11_norm = params.m11.jacobiSvd().singularValues()(0);
  if (m11_norm > c * d) report("||M11||", m11_norm, c * d);
  if (params.m21.norm() > 0.0) report("||m21||", params.m21.norm(), 0.0);
  const double v21_limit = c / (d * static_cast<double>(l));
  if (params.v21.norm() > v21_limit) report("||v21||", params.v21.norm(), v21_limit);
  if (std::abs(params.v22) > c / d) report("|v22|", std::abs(params.v22), c / d);
  return out;
}

}  // namespace icltemp
