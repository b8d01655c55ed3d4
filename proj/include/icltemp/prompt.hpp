#pragma once

#include "icltemp/gaussian.hpp"
#include "icltemp/rng.hpp"
#include "icltemp/types.hpp"

namespace icltemp {

struct TaskDistribution {
  GaussianSpec w_spec;  // task vectors w ~ N(mu_w, Sigma_w)
};

struct DataDistribution {
  GaussianSpec x_spec;
  TaskDistribution task;
  NoiseSpec noise;

  [[nodiscard]] Index dim() const { return x_spec.dim(); }
};

// One in-context regression episode.  inputs holds l rows x_1..x_l with the
// query x_l last; labels holds y_1..y_{l-1}.  The query's true label and the
// task vector are kept outside the embedding so that diagnostics and oracles
// never leak them through the model path.
struct Prompt {
  Matrix inputs;
  Vector labels;
  double true_query_label = 0.0;
  Vector task_vector;

  [[nodiscard]] Index context_size() const { return inputs.rows(); }
  [[nodiscard]] Index dim() const { return inputs.cols(); }
  [[nodiscard]] Eigen::Ref<const Vector> query() const {
    return inputs.row(inputs.rows() - 1).transpose();
  }
};

// Finite-sample prompt statistics.  The divisor is l throughout, also for the
// label sums which only run over the l-1 labelled pairs; s_x and C_xx include
// the query column while s_y, C_xy, C_yy do not.  The closed-form results in
// this project are derived under exactly this convention, so it is not
// negotiable.
struct SummaryStats {
  Vector s_x;
  double s_y = 0.0;
  Matrix c_xx;
  Vector c_xy;
  double c_yy = 0.0;
};

Vector sample_task(const TaskDistribution& dist, RngStream rng);

// Draw order per prompt: task vector from rng.child(0), inputs from
// rng.child(1), noise from rng.child(2).  Requires l >= 2.
Prompt sample_prompt(const DataDistribution& dist, Index l, RngStream rng);

SummaryStats summary_stats(const Prompt& prompt);

// Caches the covariance factors of a distribution so many prompts can be
// drawn cheaply.  sample(l, rng) is bit-identical to sample_prompt().
class PromptSampler {
 public:
  explicit PromptSampler(const DataDistribution& dist);

  [[nodiscard]] Prompt sample(Index l, RngStream rng) const;
  [[nodiscard]] const DataDistribution& distribution() const { return dist_; }

 private:
  DataDistribution dist_;
  CovarianceFactor x_factor_;
  CovarianceFactor w_factor_;
  double sigma_;
};

}  // namespace icltemp
