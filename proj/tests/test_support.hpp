#pragma once

#include <cmath>

#include "icltemp/attention.hpp"
#include "icltemp/prompt.hpp"
#include "icltemp/rng.hpp"
#include "icltemp/types.hpp"

namespace icltemp::test {

inline DataDistribution isotropic_distribution(Index d, double sigma2,
                                               double x_variance = 1.0) {
  DataDistribution dist;
  dist.x_spec = GaussianSpec::isotropic(d, x_variance);
  dist.task.w_spec = GaussianSpec::isotropic(d);
  dist.noise.sigma2 = sigma2;
  return dist;
}

// The exact pretraining construction for isotropic populations.
inline AttentionParams isotropic_params(Index d) {
  AttentionParams p;
  p.m11 = static_cast<double>(d) * Matrix::Identity(d, d);
  p.m21 = Vector::Zero(d);
  p.v21 = Vector::Zero(d);
  p.v22 = 1.0 / static_cast<double>(d);
  p.tau = 1.0;
  return p;
}

// Independent route to the linearized prediction: materialize the embedding,
// apply the first-order score map column by column, and read the label slot
// of the query column from the full layer output.
inline double direct_linearized_prediction(const Prompt& prompt,
                                           const AttentionParams& params) {
  const Index d = prompt.dim();
  const Index l = prompt.context_size();
  const Matrix z = embedding_matrix(prompt);

  Matrix m = Matrix::Zero(d + 1, d + 1);
  m.topLeftCorner(d, d) = params.m11;
  m.block(d, 0, 1, d) = params.m21.transpose();
  Matrix v = Matrix::Zero(d + 1, d + 1);
  v.block(d, 0, 1, d) = params.v21.transpose();
  v(d, d) = params.v22;

  const Matrix scores = z.transpose() * m * z;
  const double ll = static_cast<double>(l);
  Matrix attn(l, l);
  for (Index j = 0; j < l; ++j) {
    const Vector col = scores.col(j) / params.tau;
    attn.col(j) =
        Vector::Constant(l, (1.0 - col.sum() / ll) / ll) + col / ll;
  }
  const Matrix out = z + v * z * attn;
  return out(d, l - 1);
}

inline Prompt make_prompt(const Matrix& inputs, const Vector& labels,
                          double true_query_label = 0.0) {
  Prompt p;
  p.inputs = inputs;
  p.labels = labels;
  p.true_query_label = true_query_label;
  p.task_vector = Vector::Zero(inputs.cols());
  return p;
}

}  // namespace icltemp::test
