#pragma once

#include <string>
#include <vector>

#include "icltemp/prompt.hpp"
#include "icltemp/types.hpp"

namespace icltemp {

// Reparametrized single-layer attention weights.  With the value matrix V
// and score matrix M = K^T Q written in blocks, only the input-input block
// M11, the label row m21 of M, and the bottom row (v21^T, v22) of V reach the
// prediction; tau is the attention temperature dividing the scores.
struct AttentionParams {
  Matrix m11;
  Vector m21;
  Vector v21;
  double v22 = 0.0;
  double tau = 1.0;

  [[nodiscard]] Index dim() const { return m11.rows(); }

  static AttentionParams zero(Index d);
};

struct FullAttentionWeights {
  Matrix k, q, v;  // (d+1) x (d+1)
  double tau = 1.0;
};

// K = I and Q = M, so K^T Q reproduces the score blocks; V carries
// (v21^T, v22) in its bottom row and is zero elsewhere.
FullAttentionWeights full_weights_from(const AttentionParams& params);

struct Prediction {
  double y_hat = 0.0;
  Vector w_att;        // regression direction before the 1/tau scaling
  double b_att = 0.0;  // bias from the zeroth-order softmax term
};

// softmax(z/tau), computed with max-subtraction.  Entries are positive and
// sum to one.
Vector softmax_map(const Vector& z, double tau);

// First-order expansion of softmax(z/tau) around zero scores:
//   (1/l) 1 + (1/l) z/tau - (1/l^2) (sum_j z_j/tau) 1.
// Entries may be negative (deliberately not clipped) and sum to one exactly.
Vector linearized_softmax_map(const Vector& z, double tau);

// The (d+1, l) entry of the linearized attention layer, evaluated through the
// prompt summary statistics:
//   w_att = M11^T (C_xx v21 + v22 C_xy) + (v21^T C_xy + v22 C_yy) m21
//   b_att = v21^T s_x + v22 s_y
//   y_hat = (1/tau) w_att^T x_l + b_att.
Prediction predict_linearized(const Prompt& prompt,
                              const AttentionParams& params);

// Linear attention baseline: same algebra with uncentered second moments
// (divisor l, query included for the input Gram) and no bias term.
double predict_linear_attention(const Prompt& prompt,
                                const AttentionParams& params);

// Exact softmax attention layer with residual stream; the prediction is the
// label slot of the query column, to which the residual contributes zero.
double predict_softmax_reference(const Prompt& prompt,
                                 const FullAttentionWeights& weights);

// Embedding matrix of a prompt: inputs as columns with a label row whose
// query entry is zero.
Matrix embedding_matrix(const Prompt& prompt);

struct MapSummary {
  double mean = 0.0;
  double variance = 0.0;  // population variance, divisor l
  double min = 0.0;
  double max = 0.0;
};

struct TemperatureEffect {
  double tau = 0.0;
  MapSummary softmax;
  MapSummary linearized;
  MapSummary scaled;  // plain z/(l*tau)
};

// Per-temperature spread of the three score maps over one score vector.
std::vector<TemperatureEffect> histogram_compare(
    const Vector& z, const std::vector<double>& taus);

// Advisory norm checks: ||M11|| <= c d, m21 = 0, ||v21|| <= c/(d l),
// |v22| <= c/d.  Returns human-readable violations, empty when compliant.
std::vector<std::string> assumption_violations(const AttentionParams& params,
                                               double c, Index l);

}  // namespace icltemp
