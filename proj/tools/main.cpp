#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "icltemp/attention.hpp"
#include "icltemp/figures.hpp"
#include "icltemp/harness.hpp"
#include "icltemp/oracles.hpp"
#include "icltemp/params_io.hpp"
#include "icltemp/pretrain.hpp"
#include "icltemp/scenario_config.hpp"

namespace {

using icltemp::ErrorMode;
using icltemp::ErrorRecord;
using icltemp::ErrorReport;

nlohmann::json load_config_json(const std::string& path,
                                const std::vector<std::string>& overrides) {
  std::ifstream file(path);
  if (!file) {
    throw std::runtime_error("config error: cannot open '" + path + "'");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(file);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("config error: " + path + ": " + e.what());
  }
  for (const std::string& assignment : overrides) {
    icltemp::apply_override(doc, assignment);
  }
  return doc;
}

void print_summary(const ErrorReport& report) {
  // One line per (l, tau) pairing the mc row with its theory and bayes rows.
  for (const ErrorRecord& r : report.records) {
    if (r.mode != ErrorMode::kMc) continue;
    std::cout << "l=" << r.l << " tau=" << r.tau << " [" << r.tau_policy
              << "] mc=" << r.error;
    if (r.std_error.has_value()) std::cout << " (+-" << *r.std_error << ")";
    for (const ErrorRecord& other : report.records) {
      if (other.l != r.l || other.case_label != r.case_label) continue;
      if (other.mode == ErrorMode::kTheory && other.tau == r.tau &&
          other.tau_policy == r.tau_policy) {
        std::cout << " theory=" << other.error;
      }
      if (other.mode == ErrorMode::kBayes &&
          other.tau_policy == r.tau_policy) {
        std::cout << " bayes=" << other.error;
      }
      if (other.mode == ErrorMode::kLinearAttention && other.tau == r.tau &&
          other.tau_policy == r.tau_policy) {
        std::cout << " linear_attention=" << other.error;
      }
    }
    std::cout << "\n";
  }
  for (const auto& skip : report.skipped) {
    std::cout << "l=" << skip.l << " [" << skip.tau_policy
              << "] skipped: " << skip.reason << "\n";
  }
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::vector<std::string>& overrides) {
  const nlohmann::json doc = load_config_json(config_path, overrides);
  const icltemp::ShiftScenario scenario = icltemp::parse_scenario(doc);
  const ErrorReport report = icltemp::run_scenario(scenario);
  if (!out_path.empty()) {
    icltemp::emit_csv(report, out_path);
    std::cout << "wrote " << out_path << "\n";
  }
  print_summary(report);
  return 0;
}

int cmd_reproduce(const std::string& figure_id,
                  const icltemp::ReproduceOptions& options) {
  const auto paths = icltemp::reproduce_figure(figure_id, options);
  for (const auto& p : paths) std::cout << "wrote " << p.string() << "\n";
  return 0;
}

int cmd_oracle(const std::string& which, long trials, std::uint64_t seed) {
  std::vector<icltemp::OracleOutcome> outcomes;
  if (which == "moments" || which == "all") {
    outcomes.push_back(icltemp::oracle_moments(trials, seed));
  }
  if (which == "taylor" || which == "all") {
    outcomes.push_back(icltemp::oracle_taylor(trials, seed));
  }
  if (which == "argmin" || which == "all") {
    outcomes.push_back(
        icltemp::oracle_argmin(std::min<long>(trials, 20), seed));
  }
  if (outcomes.empty()) {
    std::cerr << "unknown oracle '" << which
              << "' (expected moments, taylor, argmin, or all)\n";
    return 2;
  }
  bool all_pass = true;
  for (const auto& o : outcomes) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << o.name << ": "
              << o.detail << "\n";
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}

int cmd_pretrain(const std::string& config_path, long l_override,
                 const std::string& out_path,
                 const std::vector<std::string>& overrides) {
  const nlohmann::json doc = load_config_json(config_path, overrides);
  const icltemp::ShiftScenario scenario = icltemp::parse_scenario(doc);
  const icltemp::Index l =
      l_override > 0 ? static_cast<icltemp::Index>(l_override)
                     : scenario.l_grid.front();
  const icltemp::PretrainResult result = icltemp::pretrain_streaming(
      scenario.train, scenario.m, l, icltemp::pretraining_stream(l),
      scenario.threads);

  if (out_path.empty()) {
    icltemp::write_params_text(result.params, std::cout);
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
      throw std::runtime_error("pretrain: cannot open '" + out_path + "'");
    }
    icltemp::write_params_text(result.params, file);
    std::cout << "wrote " << out_path << "\n";
  }
  std::cout << "pretrained on m=" << scenario.m << " episodes at l=" << l
            << ", sigma2_hat=" << result.stats.sigma2_hat << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "icltemp: generalization of temperature-scaled linearized attention on "
      "in-context linear regression"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed_flag;
  std::optional<long> n_prompts_flag;
  std::optional<int> threads_flag;

  auto* run = app.add_subcommand("run", "run a scenario config, write CSV");
  run->add_option("config", config_path, "scenario JSON")->required();
  run->add_option("--out", out_path, "output CSV path");
  run->add_option("--set", overrides, "override config fields, path=value");
  run->add_option("--seed", seed_flag, "override the scenario seed");
  run->add_option("--n-prompts", n_prompts_flag, "override n_prompts");
  run->add_option("--threads", threads_flag, "worker threads (0 = all cores)");

  icltemp::ReproduceOptions repro;
  std::string figure_id;
  auto* reproduce =
      app.add_subcommand("reproduce", "run a bundled experiment panel");
  reproduce->add_option("figure", figure_id, "panel id, e.g. fig1b")
      ->required();
  reproduce->add_option("--out-dir", repro.out_dir, "output directory");
  reproduce->add_option("--seed", repro.seed, "master seed");
  reproduce->add_option("--n-prompts", repro.n_prompts, "prompts per point");
  reproduce->add_option("--threads", repro.threads, "worker threads");

  std::string oracle_which = "all";
  long oracle_trials = 1000000;
  std::uint64_t oracle_seed = 1;
  auto* oracle =
      app.add_subcommand("oracle", "run the numerical cross-checks");
  oracle->add_option("which", oracle_which, "moments | taylor | argmin | all");
  oracle->add_option("--trials", oracle_trials, "draws or trials");
  oracle->add_option("--seed", oracle_seed, "oracle seed");

  long pretrain_l = 0;
  auto* pretrain = app.add_subcommand(
      "pretrain", "pretrain on the config's train block, emit params");
  pretrain->add_option("config", config_path, "scenario JSON")->required();
  pretrain->add_option("--l", pretrain_l, "context size (default: first l_grid entry)");
  pretrain->add_option("--out", out_path, "params output path");
  pretrain->add_option("--set", overrides, "override config fields");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (seed_flag) overrides.push_back("seed=" + std::to_string(*seed_flag));
      if (n_prompts_flag) {
        overrides.push_back("n_prompts=" + std::to_string(*n_prompts_flag));
      }
      if (threads_flag) {
        overrides.push_back("threads=" + std::to_string(*threads_flag));
      }
      return cmd_run(config_path, out_path, overrides);
    }
    if (reproduce->parsed()) return cmd_reproduce(figure_id, repro);
    if (oracle->parsed()) {
      return cmd_oracle(oracle_which, oracle_trials, oracle_seed);
    }
    if (pretrain->parsed()) {
      return cmd_pretrain(config_path, pretrain_l, out_path, overrides);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
