#include "icltemp/figures.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "icltemp/attention.hpp"
#include "icltemp/rng.hpp"

namespace icltemp {

namespace {

DataDistribution isotropic_distribution(Index d, double sigma2) {
  DataDistribution dist;
  dist.x_spec = GaussianSpec::isotropic(d);
  dist.task.w_spec = GaussianSpec::isotropic(d);
  dist.noise.sigma2 = sigma2;
  return dist;
}

std::string sigma_label(double sigma) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), sigma);
  return "sigma_test_" + std::string(buf, res.ptr);
}

std::vector<Index> default_l_grid(Index d) {
  const double ratios[] = {0.5, 1, 2, 4, 8, 16, 32, 100};
  std::vector<Index> grid;
  for (double r : ratios) {
    grid.push_back(std::max<Index>(2, static_cast<Index>(std::lround(r * d))));
  }
  return grid;
}

ErrorReport run_with_policies(ShiftScenario scenario,
                              const std::vector<TauPolicy>& policies) {
  std::vector<ErrorReport> reports;
  for (const TauPolicy& policy : policies) {
    scenario.tau_policy = policy;
    reports.push_back(run_scenario(scenario));
  }
  return merge_reports(reports);
}

std::filesystem::path write_panel(const ErrorReport& report,
                                  const ReproduceOptions& options,
                                  const std::string& id) {
  const std::filesystem::path path = options.out_dir / (id + ".csv");
  emit_csv(report, path);
  return path;
}

void append_value(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

std::filesystem::path write_map_spread_panel(const ReproduceOptions& options) {
  // One fixed score vector, histogrammed through the three maps.
  constexpr Index l = 1000;
  RandomEngine engine(RngStream{options.seed, 0x666967355ull});
  Vector z(l);
  for (Index i = 0; i < l; ++i) z(i) = 2.0 * engine.normal();

  const std::vector<double> taus = {0.25, 0.5, 1.0, 2.0, 4.0, 10.0};
  const auto effects = histogram_compare(z, taus);

  std::string out = "tau,map,mean,variance,min,max\n";
  const auto row = [&out](double tau, const char* map, const MapSummary& s) {
    append_value(out, tau);
    out += ',';
    out += map;
    out += ',';
    append_value(out, s.mean);
    out += ',';
    append_value(out, s.variance);
    out += ',';
    append_value(out, s.min);
    out += ',';
    append_value(out, s.max);
    out += '\n';
  };
  for (const TemperatureEffect& e : effects) {
    row(e.tau, "softmax", e.softmax);
    row(e.tau, "linearized", e.linearized);
    row(e.tau, "scaled", e.scaled);
  }

  const std::filesystem::path path = options.out_dir / "fig5.csv";
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("reproduce: cannot open " + path.string());
  file << out;
  return path;
}

}  // namespace

const std::vector<std::string>& known_figures() {
  static const std::vector<std::string> ids = {
      "fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig4", "fig5"};
  return ids;
}

ShiftScenario baseline_scenario(Index d, long m, double sigma2,
                                const ReproduceOptions& options) {
  ShiftScenario s;
  s.d = d;
  s.m = m;
  s.train = isotropic_distribution(d, sigma2);
  s.test = s.train;
  s.l_grid = default_l_grid(d);
  s.seed = options.seed;
  s.n_prompts = options.n_prompts;
  s.threads = options.threads;
  return s;
}

std::vector<std::filesystem::path> reproduce_figure(
    const std::string& figure_id, const ReproduceOptions& options) {
  const std::vector<TauPolicy> both = {TauPolicy::pretrain_default(),
                                       TauPolicy::optimal()};

  if (figure_id == "fig1a") {
    ShiftScenario s = baseline_scenario(50, 5000, 0.01, options);
    s.id = "fig1a";
    s.case_label = "no_shift";
    return {write_panel(run_with_policies(s, both), options, s.id)};
  }
  if (figure_id == "fig1b") {
    ShiftScenario s = baseline_scenario(50, 5000, 0.01, options);
    s.id = "fig1b";
    s.case_label = "input_covariance_x2";
    s.test.x_spec.covariance = 2.0 * Matrix::Identity(s.d, s.d);
    return {write_panel(run_with_policies(s, both), options, s.id)};
  }
  if (figure_id == "fig1c") {
    ShiftScenario s = baseline_scenario(50, 5000, 0.01, options);
    s.id = "fig1c";
    s.case_label = "task_shift";
    s.test.task.w_spec.mean =
        Vector::Constant(s.d, 1.0 / std::sqrt(static_cast<double>(s.d)));
    s.test.task.w_spec.covariance = 3.0 * Matrix::Identity(s.d, s.d);
    return {write_panel(run_with_policies(s, both), options, s.id)};
  }
  if (figure_id == "fig2a") {
    ShiftScenario s = baseline_scenario(50, 5000, 0.01, options);
    s.id = "fig2a";
    s.case_label = "noise_sigma_test_10";
    s.test.noise.sigma2 = 100.0;
    return {write_panel(run_with_policies(s, both), options, s.id)};
  }
  if (figure_id == "fig2b" || figure_id == "fig2c") {
    const double sigmas[] = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
    std::vector<ErrorReport> reports;
    for (double sigma : sigmas) {
      ShiftScenario s = baseline_scenario(50, 5000, 0.01, options);
      s.id = figure_id;
      s.case_label = sigma_label(sigma);
      s.l_grid = {s.d};  // context matches dimension in this panel
      s.test.noise.sigma2 = sigma * sigma;
      for (const TauPolicy& policy :
           figure_id == "fig2c" ? std::vector<TauPolicy>{TauPolicy::optimal()}
                                : both) {
        s.tau_policy = policy;
        reports.push_back(run_scenario(s));
      }
    }
    ErrorReport merged = merge_reports(reports);
    merged.case_label = "noise_sweep";
    return {write_panel(merged, options, figure_id)};
  }
  if (figure_id == "fig4") {
    ShiftScenario base = baseline_scenario(20, 5000, 0.01, options);
    base.id = "fig4";
    base.l_grid = {10 * base.d};
    base.tau_policy = TauPolicy::fixed(1.0);
    std::vector<ErrorReport> reports;
    for (double norm : {0.0, 1.0, 2.0}) {
      Vector shift = Vector::Zero(base.d);
      shift(0) = norm;
      ShiftScenario s = base;
      s.case_label = "mu_norm_" + std::to_string(static_cast<int>(norm));
      reports.push_back(mean_shift_comparison(shift, s));
    }
    ErrorReport merged = merge_reports(reports);
    merged.case_label = "mean_shift_sweep";
    return {write_panel(merged, options, figure_id)};
  }
  if (figure_id == "fig5") {
    return {write_map_spread_panel(options)};
  }
  throw std::invalid_argument("reproduce: unknown figure id '" + figure_id +
                              "'");
}

}  // namespace icltemp
