#include "icltemp/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <tuple>

#include "icltemp/parallel.hpp"
#include "icltemp/pretrain.hpp"

namespace icltemp {

namespace {

constexpr long kPromptChunk = 64;
constexpr std::uint64_t kPretrainKey = 0x69636c74656d70ull;
constexpr std::uint64_t kSaltMc = 0x6d6f6e746563ull;

struct LinearizedTerms {
  double wx = 0.0;  // w_att . x_l, temperature-independent
  double b = 0.0;
};

// Same algebra as predict_linearized but without forming the d x d prompt
// covariance; only Gram-vector products are needed.
LinearizedTerms linearized_terms(const Prompt& p,
                                 const AttentionParams& params) {
  const Index l = p.context_size();
  const double inv_l = 1.0 / static_cast<double>(l);
  const Vector s_x = p.inputs.colwise().mean().transpose();
  const double s_y = p.labels.sum() * inv_l;

  const Vector c_xy =
      p.inputs.topRows(l - 1).transpose() * p.labels * inv_l - s_y * s_x;

  Vector inner = params.v22 * c_xy;
  if (!params.v21.isZero(0.0)) {
    const Matrix centered = p.inputs.rowwise() - s_x.transpose();
    inner.noalias() +=
        centered.transpose() * (centered * params.v21) * inv_l;
  }
  Vector w_att = params.m11.transpose() * inner;
  if (!params.m21.isZero(0.0)) {
    const double c_yy = p.labels.squaredNorm() * inv_l - s_y * s_y;
    w_att += (params.v21.dot(c_xy) + params.v22 * c_yy) * params.m21;
  }

  LinearizedTerms t;
  t.wx = w_att.dot(p.query());
  t.b = params.v21.dot(s_x) + params.v22 * s_y;
  return t;
}

double linear_attention_wx(const Prompt& p, const AttentionParams& params) {
  const Index l = p.context_size();
  const double inv_l = 1.0 / static_cast<double>(l);
  const Vector c_xy =
      p.inputs.topRows(l - 1).transpose() * p.labels * inv_l;

  Vector inner = params.v22 * c_xy;
  if (!params.v21.isZero(0.0)) {
    inner.noalias() += p.inputs.transpose() * (p.inputs * params.v21) * inv_l;
  }
  Vector w = params.m11.transpose() * inner;
  if (!params.m21.isZero(0.0)) {
    const double c_yy = p.labels.squaredNorm() * inv_l;
    w += (params.v21.dot(c_xy) + params.v22 * c_yy) * params.m21;
  }
  return w.dot(p.query());
}

McEstimate reduce_in_order(const std::vector<double>& sq) {
  const double n = static_cast<double>(sq.size());
  double sum = 0.0;
  for (double v : sq) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : sq) ss += (v - mean) * (v - mean);
  McEstimate e;
  e.mean = mean;
  e.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  if (!std::isfinite(e.mean) || !std::isfinite(e.std_error)) {
    throw std::runtime_error("mc estimate: non-finite result");
  }
  return e;
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

template <typename Int>
void append_number(std::string& out, Int v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void append_label(std::string& out, const std::string& label) {
  if (label.find(',') != std::string::npos ||
      label.find('\n') != std::string::npos) {
    throw std::invalid_argument("csv: labels must not contain ',' or newlines");
  }
  out += label;
}

}  // namespace

TauPolicy TauPolicy::fixed(double tau) {
  TauPolicy p;
  p.kind = TauPolicyKind::kFixed;
  p.fixed_tau = tau;
  return p;
}

TauPolicy TauPolicy::pretrain_default() {
  return TauPolicy{TauPolicyKind::kPretrainDefault, 1.0, {}, 0.0};
}

TauPolicy TauPolicy::optimal() {
  return TauPolicy{TauPolicyKind::kOptimal, 1.0, {}, 0.0};
}

TauPolicy TauPolicy::heuristic(double scale) {
  return TauPolicy{TauPolicyKind::kHeuristic, 1.0, {}, scale};
}

TauPolicy TauPolicy::sweep(std::vector<double> grid) {
  TauPolicy p;
  p.kind = TauPolicyKind::kSweep;
  p.grid = std::move(grid);
  return p;
}

std::string TauPolicy::label() const {
  switch (kind) {
    case TauPolicyKind::kFixed:
      return "fixed";
    case TauPolicyKind::kPretrainDefault:
      return "pretrain_default";
    case TauPolicyKind::kOptimal:
      return "optimal";
    case TauPolicyKind::kHeuristic:
      return "heuristic";
    case TauPolicyKind::kSweep:
      return "sweep";
  }
  return "unknown";
}

std::string to_string(ErrorMode mode) {
  switch (mode) {
    case ErrorMode::kTheory:
      return "theory";
    case ErrorMode::kMc:
      return "mc";
    case ErrorMode::kBayes:
      return "bayes";
    case ErrorMode::kLinearAttention:
      return "linear_attention";
  }
  return "unknown";
}

RngStream pretraining_stream(Index l) {
  return RngStream{kPretrainKey, 0}.child(static_cast<std::uint64_t>(l));
}

McBatch evaluate_mc(const McRequest& request, const DataDistribution& dist,
                    Index l, long n_prompts, RngStream rng, int threads) {
  if (n_prompts < 2) {
    throw std::invalid_argument("evaluate_mc: n_prompts must be >= 2");
  }
  if (request.taus.empty()) {
    throw std::invalid_argument("evaluate_mc: no temperatures requested");
  }
  for (double tau : request.taus) {
    if (!(tau > 0.0)) throw std::invalid_argument("evaluate_mc: tau must be > 0");
  }

  const PromptSampler sampler(dist);
  const std::size_t n_taus = request.taus.size();
  const auto n = static_cast<std::size_t>(n_prompts);

  std::optional<RidgeSolver> solver;
  if (request.bayes_prior.has_value()) solver.emplace(*request.bayes_prior);

  std::vector<std::vector<double>> lin_sq(n_taus, std::vector<double>(n));
  std::vector<double> bayes_sq(solver ? n : 0);
  std::vector<std::vector<double>> linat_sq(
      request.with_linear_attention ? n_taus : 0, std::vector<double>(n));

  parallel_chunks(
      n_prompts, kPromptChunk, threads, [&](long, long begin, long end) {
        for (long i = begin; i < end; ++i) {
          const Prompt p =
              sampler.sample(l, rng.child(static_cast<std::uint64_t>(i)));
          const double y = p.true_query_label;

          const LinearizedTerms t = linearized_terms(p, request.params);
          for (std::size_t k = 0; k < n_taus; ++k) {
            const double r = t.wx / request.taus[k] + t.b - y;
            lin_sq[k][static_cast<std::size_t>(i)] = r * r;
          }
          if (solver) {
            const double r = solver->predict(p) - y;
            bayes_sq[static_cast<std::size_t>(i)] = r * r;
          }
          if (request.with_linear_attention) {
            const double wx = linear_attention_wx(p, request.params);
            for (std::size_t k = 0; k < n_taus; ++k) {
              const double r = wx / request.taus[k] - y;
              linat_sq[k][static_cast<std::size_t>(i)] = r * r;
            }
          }
        }
      });

  McBatch batch;
  batch.linearized.reserve(n_taus);
  for (const auto& col : lin_sq) batch.linearized.push_back(reduce_in_order(col));
  if (solver) batch.bayes = reduce_in_order(bayes_sq);
  for (const auto& col : linat_sq) {
    batch.linear_attention.push_back(reduce_in_order(col));
  }
  return batch;
}

McEstimate mc_generalization_error(const AttentionParams& params,
                                   const DataDistribution& dist, Index l,
                                   long n_prompts, RngStream rng,
                                   int threads) {
  McRequest request;
  request.params = params;
  request.taus = {params.tau};
  return evaluate_mc(request, dist, l, n_prompts, rng, threads)
      .linearized.front();
}

namespace {

void validate_scenario(const ShiftScenario& s) {
  if (s.d < 1) throw std::invalid_argument("scenario: d must be >= 1");
  if (s.train.dim() != s.d || s.test.dim() != s.d) {
    throw std::invalid_argument("scenario: train/test dimension mismatch");
  }
  if (s.l_grid.empty()) throw std::invalid_argument("scenario: empty l_grid");
  for (std::size_t i = 0; i + 1 < s.l_grid.size(); ++i) {
    if (!(s.l_grid[i] < s.l_grid[i + 1])) {
      throw std::invalid_argument("scenario: l_grid must be strictly ascending");
    }
  }
  if (s.m < 2) throw std::invalid_argument("scenario: m must be >= 2");
  if (s.n_prompts < 2) {
    throw std::invalid_argument("scenario: n_prompts must be >= 2");
  }
}

std::vector<double> resolve_taus(const ShiftScenario& s,
                                 const AttentionParams& params,
                                 const TestEnvironment& env, Index l,
                                 std::vector<SkippedRecord>& skipped) {
  const TauPolicy& policy = s.tau_policy;
  switch (policy.kind) {
    case TauPolicyKind::kFixed:
      return {policy.fixed_tau};
    case TauPolicyKind::kPretrainDefault:
      return {1.0};
    case TauPolicyKind::kOptimal: {
      const TauResult r = optimal_temperature(error_curve(params, env));
      if (!r.defined()) {
        skipped.push_back({l, policy.label(), r.reason});
        return {};
      }
      return {*r.value};
    }
    case TauPolicyKind::kHeuristic: {
      const double scale = policy.heuristic_scale > 0.0
                               ? policy.heuristic_scale
                               : 1.0 / static_cast<double>(s.d);
      const TauResult r =
          heuristic_temperature(params.m11, env.sigma_x, scale);
      if (!r.defined()) {
        skipped.push_back({l, policy.label(), r.reason});
        return {};
      }
      return {*r.value};
    }
    case TauPolicyKind::kSweep:
      if (policy.grid.empty()) {
        throw std::invalid_argument("scenario: sweep policy with empty grid");
      }
      return policy.grid;
  }
  return {};
}

}  // namespace

ErrorReport run_scenario(const ShiftScenario& scenario) {
  validate_scenario(scenario);

  ErrorReport report;
  report.scenario_id = scenario.id;
  report.case_label = scenario.case_label;
  report.d = scenario.d;
  report.m = scenario.m;
  report.seed = scenario.seed;

  const RngStream base{scenario.seed, 0};
  const std::string policy_label = scenario.tau_policy.label();

  RidgePrior prior;
  prior.mu0 = scenario.test.task.w_spec.mean;
  prior.sigma0 = scenario.test.task.w_spec.covariance;
  prior.noise_var = scenario.test.noise.sigma2;

  for (const Index l : scenario.l_grid) {
    const PretrainResult pre = pretrain_streaming(
        scenario.train, scenario.m, l, pretraining_stream(l),
        scenario.threads);
    const TestEnvironment env = make_test_environment(scenario.test, l);

    const std::vector<double> taus =
        resolve_taus(scenario, pre.params, env, l, report.skipped);
    if (taus.empty()) continue;

    const ErrorCurve curve = error_curve(pre.params, env);
    for (const double tau : taus) {
      report.records.push_back({scenario.case_label, l, tau, policy_label,
                                ErrorMode::kTheory, curve(tau), std::nullopt,
                                0});
    }

    McRequest request;
    request.params = pre.params;
    request.taus = taus;
    request.bayes_prior = prior;
    request.with_linear_attention = scenario.include_linear_attention;
    const McBatch batch = evaluate_mc(
        request, scenario.test, l, scenario.n_prompts,
        base.child(kSaltMc).child(static_cast<std::uint64_t>(l)),
        scenario.threads);

    for (std::size_t k = 0; k < taus.size(); ++k) {
      report.records.push_back({scenario.case_label, l, taus[k], policy_label,
                                ErrorMode::kMc, batch.linearized[k].mean,
                                batch.linearized[k].std_error,
                                scenario.n_prompts});
    }
    report.records.push_back({scenario.case_label, l, 0.0, policy_label,
                              ErrorMode::kBayes, batch.bayes->mean,
                              batch.bayes->std_error, scenario.n_prompts});
    for (std::size_t k = 0; k < batch.linear_attention.size(); ++k) {
      report.records.push_back({scenario.case_label, l, taus[k], policy_label,
                                ErrorMode::kLinearAttention,
                                batch.linear_attention[k].mean,
                                batch.linear_attention[k].std_error,
                                scenario.n_prompts});
    }
  }

  for (const ErrorRecord& r : report.records) {
    if (!std::isfinite(r.error)) {
      throw std::runtime_error("run_scenario: non-finite error recorded");
    }
  }
  sort_records(report);
  return report;
}

ErrorReport mean_shift_comparison(const Vector& mu_shift,
                                  const ShiftScenario& base) {
  if (mu_shift.size() != base.d) {
    throw std::invalid_argument("mean_shift_comparison: shift dimension mismatch");
  }
  ShiftScenario shifted = base;
  shifted.test.x_spec.mean += mu_shift;
  shifted.include_linear_attention = true;
  return run_scenario(shifted);
}

ErrorReport merge_reports(const std::vector<ErrorReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("merge_reports: no reports");
  ErrorReport merged = reports.front();
  for (std::size_t i = 1; i < reports.size(); ++i) {
    merged.records.insert(merged.records.end(), reports[i].records.begin(),
                          reports[i].records.end());
    merged.skipped.insert(merged.skipped.end(), reports[i].skipped.begin(),
                          reports[i].skipped.end());
  }
  sort_records(merged);
  return merged;
}

void sort_records(ErrorReport& report) {
  const auto key = [](const ErrorRecord& r) {
    return std::make_tuple(r.l, r.tau, to_string(r.mode), r.tau_policy,
                           r.case_label);
  };
  std::stable_sort(report.records.begin(), report.records.end(),
                   [&key](const ErrorRecord& a, const ErrorRecord& b) {
                     return key(a) < key(b);
                   });
}

std::string csv_string(const ErrorReport& report) {
  std::string out =
      "scenario_id,case_label,d,l,m,tau_policy,tau,mode,error,stderr,"
      "n_prompts,seed\n";
  for (const ErrorRecord& r : report.records) {
    append_label(out, report.scenario_id);
    out += ',';
    append_label(out, r.case_label);
    out += ',';
    append_number(out, static_cast<long>(report.d));
    out += ',';
    append_number(out, static_cast<long>(r.l));
    out += ',';
    append_number(out, report.m);
    out += ',';
    append_label(out, r.tau_policy);
    out += ',';
    append_number(out, r.tau);
    out += ',';
    out += to_string(r.mode);
    out += ',';
    append_number(out, r.error);
    out += ',';
    if (r.std_error.has_value()) append_number(out, *r.std_error);
    out += ',';
    append_number(out, r.n_prompts);
    out += ',';
    append_number(out, report.seed);
    out += '\n';
  }
  return out;
}

void emit_csv(const ErrorReport& report, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("emit_csv: cannot open " + path.string());
  }
  file << csv_string(report);
  if (!file) {
    throw std::runtime_error("emit_csv: write failed for " + path.string());
  }
}

}  // namespace icltemp
