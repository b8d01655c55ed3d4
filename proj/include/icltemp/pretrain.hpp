#pragma once

#include <optional>
#include <vector>

#include "icltemp/attention.hpp"
#include "icltemp/prompt.hpp"
#include "icltemp/ridge.hpp"
#include "icltemp/types.hpp"

namespace icltemp {

// Pooled pretraining data: m episodes of context length l.  pooled_inputs is
// the (m*l) x d matrix of all inputs, centered by the pooled mean (which is
// kept so label residuals can be formed against the raw inputs).  Rows are
// episode-major with each episode's query row last; labels row j holds the
// l-1 labels of episode j.
struct PretrainCorpus {
  long m = 0;
  Index l = 0;
  Matrix pooled_inputs;
  Vector pooled_mean;
  std::optional<Matrix> task_vectors;  // m x d
  std::optional<Matrix> labels;        // m x (l-1)
  std::optional<double> noise_var_hint;
};

struct EstimatedTaskStats {
  Vector mu_w_hat;
  Matrix sigma_w_hat;
  double sigma2_hat = 0.0;
};

PretrainCorpus build_corpus(const DataDistribution& dist, long m, Index l,
                            RngStream rng);

// Sample mean / covariance (divisor m-1, plus PSD jitter) of the observed
// task vectors; noise variance from label residuals when labels are present,
// otherwise from the hint.  Requires task vectors with m >= 2.
EstimatedTaskStats estimate_task_stats(const PretrainCorpus& corpus);

// Closed-form parameter construction from the pooled input covariance and
// estimated task statistics:
//   M11 = d (S + (sigma2/l) Sigma_w^{-1})^{-1},  m21 = 0,
//   v21 = (sigma2 / (d l)) S^{-1} Sigma_w^{-1} mu_w,  v22 = 1/d,  tau = 1.
AttentionParams params_from_moments(const Matrix& pooled_cov,
                                    const EstimatedTaskStats& stats, Index l);

AttentionParams pretrain_params(const PretrainCorpus& corpus,
                                const EstimatedTaskStats& stats);

struct PretrainResult {
  EstimatedTaskStats stats;
  AttentionParams params;
  Matrix pooled_cov;
};

// Streaming variant: accumulates the pooled moments episode by episode
// without ever materializing the (m*l) x d matrix.  Episodes are processed in
// fixed chunks whose partial sums are reduced in index order, so the result
// does not depend on the number of worker threads.  Uses the same per-episode
// streams as build_corpus.
PretrainResult pretrain_streaming(const DataDistribution& dist, long m,
                                  Index l, RngStream rng, int threads = 0);

// Infinite-data limit of the same construction: the pooled covariance is the
// population input covariance and the task statistics are exact.
AttentionParams pretrain_params_population(const DataDistribution& dist,
                                           Index l);

// Mean absolute disagreement between the linearized attention prediction and
// the ridge oracle over a set of prompts, normalized by the sample standard
// deviation of the true query labels.  Convergence diagnostic.
double bayes_alignment_gap(const AttentionParams& params,
                           const std::vector<Prompt>& prompts,
                           const RidgePrior& prior);

}  // namespace icltemp
