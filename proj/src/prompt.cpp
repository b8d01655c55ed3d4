#include "icltemp/prompt.hpp"

#include <cmath>
#include <stdexcept>

namespace icltemp {

Vector sample_task(const TaskDistribution& dist, RngStream rng) {
  return sample(dist.w_spec, 1, rng).row(0).transpose();
}

PromptSampler::PromptSampler(const DataDistribution& dist)
    : dist_(dist),
      x_factor_(dist.x_spec.covariance),
      w_factor_(dist.task.w_spec.covariance),
      sigma_(std::sqrt(dist.noise.sigma2)) {
  if (dist.task.w_spec.dim() != dist.x_spec.dim()) {
    throw std::invalid_argument("data distribution: task/input dimension mismatch");
  }
  if (!(dist.noise.sigma2 >= 0.0)) {
    throw std::invalid_argument("data distribution: sigma2 must be >= 0");
  }
}

Prompt PromptSampler::sample(Index l, RngStream rng) const {
  if (l < 2) {
    throw std::invalid_argument("sample_prompt: context size l must be >= 2");
  }
  Prompt p;
  p.task_vector =
      sample_with_factor(dist_.task.w_spec.mean, w_factor_, 1, rng.child(0))
          .row(0)
          .transpose();
  p.inputs = sample_with_factor(dist_.x_spec.mean, x_factor_, l, rng.child(1));

  RandomEngine noise_engine(rng.child(2));
  Vector eps(l);
  for (Index i = 0; i < l; ++i) eps(i) = sigma_ * noise_engine.normal();

  p.labels = p.inputs.topRows(l - 1) * p.task_vector + eps.head(l - 1);
  p.true_query_label =
      p.inputs.row(l - 1).dot(p.task_vector) + eps(l - 1);
  return p;
}

Prompt sample_prompt(const DataDistribution& dist, Index l, RngStream rng) {
  return PromptSampler(dist).sample(l, rng);
}

SummaryStats summary_stats(const Prompt& prompt) {
  const Index l = prompt.context_size();
  const Index d = prompt.dim();
  const double inv_l = 1.0 / static_cast<double>(l);

  SummaryStats s;
  s.s_x = prompt.inputs.colwise().mean().transpose();
  s.s_y = prompt.labels.sum() * inv_l;

  const Matrix centered = prompt.inputs.rowwise() - s.s_x.transpose();
  s.c_xx = Matrix::Zero(d, d);
  s.c_xx.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(),
                                                    inv_l);
  s.c_xx.triangularView<Eigen::StrictlyUpper>() =
      s.c_xx.transpose().triangularView<Eigen::StrictlyUpper>();

  s.c_xy = prompt.inputs.topRows(l - 1).transpose() * prompt.labels * inv_l -
           s.s_y * s.s_x;
  s.c_yy = prompt.labels.squaredNorm() * inv_l - s.s_y * s.s_y;
  return s;
}

}  // namespace icltemp
