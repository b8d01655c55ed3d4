#include "icltemp/pretrain.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "icltemp/parallel.hpp"
#include "icltemp/spd.hpp"

namespace icltemp {

namespace {

constexpr long kEpisodeChunk = 32;

double psd_jitter(double trace, Index d) {
  const double base = d > 0 ? 1e-10 * trace / static_cast<double>(d) : 0.0;
  return base > 0.0 ? base : 1e-12;
}

EstimatedTaskStats task_stats_from(const Matrix& tasks, double rss,
                                   long n_residuals,
                                   std::optional<double> hint) {
  const long m = tasks.rows();
  const Index d = tasks.cols();
  if (m < 2) {
    throw std::invalid_argument("estimate_task_stats: needs m >= 2 task vectors");
  }
  EstimatedTaskStats stats;
  stats.mu_w_hat = tasks.colwise().mean().transpose();
  const Matrix centered = tasks.rowwise() - stats.mu_w_hat.transpose();
  Matrix cov = Matrix::Zero(d, d);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(
      centered.transpose(), 1.0 / static_cast<double>(m - 1));
  cov.triangularView<Eigen::StrictlyUpper>() =
      cov.transpose().triangularView<Eigen::StrictlyUpper>();
  stats.sigma_w_hat =
      cov + psd_jitter(cov.trace(), d) * Matrix::Identity(d, d);

  if (n_residuals > 0) {
    stats.sigma2_hat = rss / static_cast<double>(n_residuals);
  } else if (hint.has_value()) {
    stats.sigma2_hat = *hint;
  } else {
    throw std::invalid_argument(
        "estimate_task_stats: no labels and no noise_var_hint");
  }
  if (!(stats.sigma2_hat >= 0.0)) {
    throw std::invalid_argument("estimate_task_stats: negative noise variance");
  }
  return stats;
}

}  // namespace

PretrainCorpus build_corpus(const DataDistribution& dist, long m, Index l,
                            RngStream rng) {
  if (m < 1) throw std::invalid_argument("build_corpus: m must be >= 1");
  const Index d = dist.dim();
  const PromptSampler sampler(dist);

  PretrainCorpus corpus;
  corpus.m = m;
  corpus.l = l;
  corpus.pooled_inputs.resize(m * l, d);
  corpus.task_vectors.emplace(m, d);
  corpus.labels.emplace(m, l - 1);
  for (long j = 0; j < m; ++j) {
    const Prompt p = sampler.sample(l, rng.child(static_cast<std::uint64_t>(j)));
    corpus.pooled_inputs.middleRows(j * l, l) = p.inputs;
    corpus.task_vectors->row(j) = p.task_vector.transpose();
    corpus.labels->row(j) = p.labels.transpose();
  }
  corpus.pooled_mean = corpus.pooled_inputs.colwise().mean().transpose();
  corpus.pooled_inputs.rowwise() -= corpus.pooled_mean.transpose();
  return corpus;
}

EstimatedTaskStats estimate_task_stats(const PretrainCorpus& corpus) {
  if (!corpus.task_vectors.has_value()) {
    throw std::invalid_argument("estimate_task_stats: task vectors required");
  }
  double rss = 0.0;
  long n_residuals = 0;
  if (corpus.labels.has_value()) {
    for (long j = 0; j < corpus.m; ++j) {
      // Raw inputs are centered rows plus the pooled mean.
      const Matrix raw =
          corpus.pooled_inputs.middleRows(j * corpus.l, corpus.l - 1).rowwise() +
          corpus.pooled_mean.transpose();
      const Vector resid = corpus.labels->row(j).transpose() -
                           raw * corpus.task_vectors->row(j).transpose();
      rss += resid.squaredNorm();
      n_residuals += corpus.l - 1;
    }
  }
  return task_stats_from(*corpus.task_vectors, rss, n_residuals,
                         corpus.noise_var_hint);
}

AttentionParams params_from_moments(const Matrix& pooled_cov,
                                    const EstimatedTaskStats& stats, Index l) {
  const Index d = pooled_cov.rows();
  const double dd = static_cast<double>(d);
  const double ll = static_cast<double>(l);

  const Matrix sigma_w_inv = spd_inverse(stats.sigma_w_hat, "task covariance");

  AttentionParams params;
  params.m11 = dd * spd_inverse(pooled_cov + (stats.sigma2_hat / ll) * sigma_w_inv,
                                "pooled covariance");
  params.m21 = Vector::Zero(d);
  params.v21 = (stats.sigma2_hat / (dd * ll)) *
               spd_solve(pooled_cov, sigma_w_inv * stats.mu_w_hat,
                         "pooled covariance");
  params.v22 = 1.0 / dd;
  params.tau = 1.0;
  return params;
}

AttentionParams pretrain_params(const PretrainCorpus& corpus,
                                const EstimatedTaskStats& stats) {
  const Index d = corpus.pooled_inputs.cols();
  const long n = corpus.pooled_inputs.rows();
  const double scale =
      std::max(1.0, corpus.pooled_inputs.cwiseAbs().maxCoeff());
  if (corpus.pooled_inputs.colwise().mean().cwiseAbs().maxCoeff() >
      1e-10 * scale) {
    throw std::invalid_argument("pretrain_params: pooled inputs not centered");
  }
  if (n <= d) {
    std::cerr << "pretrain_params: warning: m*l = " << n
              << " <= d = " << d << ", pooled covariance is rank deficient\n";
  }
  Matrix pooled_cov = Matrix::Zero(d, d);
  pooled_cov.selfadjointView<Eigen::Lower>().rankUpdate(
      corpus.pooled_inputs.transpose(), 1.0 / static_cast<double>(n));
  pooled_cov.triangularView<Eigen::StrictlyUpper>() =
      pooled_cov.transpose().triangularView<Eigen::StrictlyUpper>();
  return params_from_moments(pooled_cov, stats, corpus.l);
}

PretrainResult pretrain_streaming(const DataDistribution& dist, long m,
                                  Index l, RngStream rng, int threads) {
  if (m < 2) throw std::invalid_argument("pretrain_streaming: m must be >= 2");
  const Index d = dist.dim();
  const PromptSampler sampler(dist);

  const long n_chunks = (m + kEpisodeChunk - 1) / kEpisodeChunk;
  std::vector<Matrix> grams(n_chunks);
  std::vector<Vector> sums(n_chunks);
  std::vector<double> rss(n_chunks, 0.0);
  Matrix tasks(m, d);

  parallel_chunks(m, kEpisodeChunk, threads,
                  [&](long chunk, long begin, long end) {
                    Matrix gram = Matrix::Zero(d, d);
                    Vector sum = Vector::Zero(d);
                    double r = 0.0;
                    for (long j = begin; j < end; ++j) {
                      const Prompt p = sampler.sample(
                          l, rng.child(static_cast<std::uint64_t>(j)));
                      gram.selfadjointView<Eigen::Lower>().rankUpdate(
                          p.inputs.transpose(), 1.0);
                      sum += p.inputs.colwise().sum().transpose();
                      tasks.row(j) = p.task_vector.transpose();
                      r += (p.labels -
                            p.inputs.topRows(l - 1) * p.task_vector)
                               .squaredNorm();
                    }
                    grams[chunk] = std::move(gram);
                    sums[chunk] = std::move(sum);
                    rss[chunk] = r;
                  });

  Matrix gram = Matrix::Zero(d, d);
  Vector sum = Vector::Zero(d);
  double total_rss = 0.0;
  for (long c = 0; c < n_chunks; ++c) {
    gram += grams[c];
    sum += sums[c];
    total_rss += rss[c];
  }
  gram.triangularView<Eigen::StrictlyUpper>() =
      gram.transpose().triangularView<Eigen::StrictlyUpper>();

  const double n = static_cast<double>(m) * static_cast<double>(l);
  const Vector mean = sum / n;

  PretrainResult result;
  result.pooled_cov = gram / n - mean * mean.transpose();
  result.stats = task_stats_from(tasks, total_rss, m * (l - 1), std::nullopt);
  result.params = params_from_moments(result.pooled_cov, result.stats, l);
  return result;
}

AttentionParams pretrain_params_population(const DataDistribution& dist,
                                           Index l) {
  EstimatedTaskStats stats;
  stats.mu_w_hat = dist.task.w_spec.mean;
  stats.sigma_w_hat = dist.task.w_spec.covariance;
  stats.sigma2_hat = dist.noise.sigma2;
  return params_from_moments(dist.x_spec.covariance, stats, l);
}

double bayes_alignment_gap(const AttentionParams& params,
                           const std::vector<Prompt>& prompts,
                           const RidgePrior& prior) {
  if (prompts.size() < 2) {
    throw std::invalid_argument("bayes_alignment_gap: needs at least 2 prompts");
  }
  const RidgeSolver solver(prior);
  double abs_gap = 0.0;
  double label_sum = 0.0;
  double label_sq = 0.0;
  for (const Prompt& p : prompts) {
    const double lin = predict_linearized(p, params).y_hat;
    const double bayes = solver.predict(p);
    abs_gap += std::abs(lin - bayes);
    label_sum += p.true_query_label;
    label_sq += p.true_query_label * p.true_query_label;
  }
  const double n = static_cast<double>(prompts.size());
  const double label_var =
      (label_sq - label_sum * label_sum / n) / (n - 1.0);
  if (!(label_var > 0.0)) {
    throw std::runtime_error("bayes_alignment_gap: degenerate labels");
  }
  return (abs_gap / n) / std::sqrt(label_var);
}

}  // namespace icltemp
