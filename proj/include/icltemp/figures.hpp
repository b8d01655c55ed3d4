#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "icltemp/harness.hpp"

namespace icltemp {

// Bundled synthetic-experiment panels.  Each id produces one CSV in out_dir:
//   fig1a  no shift                       (d=50, m=5000, sigma2=0.01)
//   fig1b  input covariance doubled at test time
//   fig1c  task mean 1/sqrt(d), task covariance tripled
//   fig2a  test noise sigma=10, error over l
//   fig2b  test noise sweep at l = d
//   fig2c  optimal temperature over the same noise sweep
//   fig4   input mean shift, linear vs linearized attention (d=20, l=10d)
//   fig5   per-temperature spread of the score maps (own schema:
//          tau,map,mean,variance,min,max)
struct ReproduceOptions {
  std::filesystem::path out_dir = ".";
  long n_prompts = 10000;
  int threads = 0;
  std::uint64_t seed = 1;
};

const std::vector<std::string>& known_figures();

std::vector<std::filesystem::path> reproduce_figure(
    const std::string& figure_id, const ReproduceOptions& options);

// The no-shift baseline scenario shared by several panels.
ShiftScenario baseline_scenario(Index d, long m, double sigma2,
                                const ReproduceOptions& options);

}  // namespace icltemp
