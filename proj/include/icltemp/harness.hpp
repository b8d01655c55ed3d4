#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "icltemp/attention.hpp"
#include "icltemp/generalization.hpp"
#include "icltemp/prompt.hpp"
#include "icltemp/ridge.hpp"
#include "icltemp/types.hpp"

namespace icltemp {

enum class TauPolicyKind {
  kFixed,            // one user-supplied temperature
  kPretrainDefault,  // tau = 1, the value used during pretraining
  kOptimal,          // closed-form minimizer of the error curve
  kHeuristic,        // score variance-to-mean ratio
  kSweep,            // explicit temperature grid
};

struct TauPolicy {
  TauPolicyKind kind = TauPolicyKind::kPretrainDefault;
  double fixed_tau = 1.0;
  std::vector<double> grid;
  double heuristic_scale = 0.0;  // 0 means 1/d

  static TauPolicy fixed(double tau);
  static TauPolicy pretrain_default();
  static TauPolicy optimal();
  static TauPolicy heuristic(double scale = 0.0);
  static TauPolicy sweep(std::vector<double> grid);

  [[nodiscard]] std::string label() const;
};

struct ShiftScenario {
  std::string id = "scenario";
  std::string case_label = "default";
  DataDistribution train;
  DataDistribution test;
  Index d = 0;
  std::vector<Index> l_grid;  // nonempty, strictly ascending
  long m = 0;                 // pretraining episodes
  std::uint64_t seed = 0;
  TauPolicy tau_policy;
  long n_prompts = 10000;
  int threads = 0;  // 0 = hardware concurrency
  bool include_linear_attention = false;
};

enum class ErrorMode { kTheory, kMc, kBayes, kLinearAttention };

std::string to_string(ErrorMode mode);

struct ErrorRecord {
  std::string case_label;
  Index l = 0;
  double tau = 0.0;  // 0 on bayes rows, which do not depend on tau
  std::string tau_policy;
  ErrorMode mode = ErrorMode::kMc;
  double error = 0.0;
  std::optional<double> std_error;  // absent on closed-form rows
  long n_prompts = 0;               // 0 on closed-form rows
};

struct SkippedRecord {
  Index l = 0;
  std::string tau_policy;
  std::string reason;
};

struct ErrorReport {
  std::string scenario_id;
  std::string case_label;
  Index d = 0;
  long m = 0;
  std::uint64_t seed = 0;
  std::vector<ErrorRecord> records;
  std::vector<SkippedRecord> skipped;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample std of squared residuals / sqrt(n)
};

// Mean squared prediction error over fresh prompts, each with its own task
// vector.  Prompt i is drawn from rng.child(i) and the reduction runs in
// index order, so the estimate is a pure function of the arguments no matter
// how many worker threads run.
McEstimate mc_generalization_error(const AttentionParams& params,
                                   const DataDistribution& dist, Index l,
                                   long n_prompts, RngStream rng,
                                   int threads = 0);

// One Monte Carlo pass evaluating several predictors on the same prompts.
struct McRequest {
  AttentionParams params;
  std::vector<double> taus;  // linearized layer evaluated at each temperature
  std::optional<RidgePrior> bayes_prior;
  bool with_linear_attention = false;
};

struct McBatch {
  std::vector<McEstimate> linearized;        // one per requested tau
  std::optional<McEstimate> bayes;
  std::vector<McEstimate> linear_attention;  // one per tau when requested
};

McBatch evaluate_mc(const McRequest& request, const DataDistribution& dist,
                    Index l, long n_prompts, RngStream rng, int threads = 0);

// Pretraining draws come from a fixed stream keyed only by the context size,
// making the pretrained model (and hence every closed-form row) a
// deterministic function of (train, m, l); the scenario seed moves only the
// Monte Carlo evaluation.
RngStream pretraining_stream(Index l);

// Pretrains on the train block (m episodes per context size), then records
// closed-form, Monte Carlo, and ridge-oracle errors against the test block
// for every l and every temperature mandated by the policy.  The oracle
// prior is the test distribution's (mu_w, Sigma_w, sigma^2).  Temperatures
// the policy cannot produce are listed in skipped with their reason.
ErrorReport run_scenario(const ShiftScenario& scenario);

// Same scenario with the test input mean shifted by mu_shift and the
// uncentered linear-attention baseline recorded next to the linearized rows.
ErrorReport mean_shift_comparison(const Vector& mu_shift,
                                  const ShiftScenario& base);

// Concatenates reports that share scenario metadata (e.g. the same scenario
// run under several temperature policies) and restores row order.
ErrorReport merge_reports(const std::vector<ErrorReport>& reports);

// Deterministic order: l ascending, then tau ascending, then mode
// lexicographic, then policy label.
void sort_records(ErrorReport& report);

// CSV with header
//   scenario_id,case_label,d,l,m,tau_policy,tau,mode,error,stderr,n_prompts,seed
// stderr is empty on closed-form rows.  Numbers are rendered with
// std::to_chars, so equal runs give byte-identical files.
std::string csv_string(const ErrorReport& report);

void emit_csv(const ErrorReport& report, const std::filesystem::path& path);

}  // namespace icltemp
