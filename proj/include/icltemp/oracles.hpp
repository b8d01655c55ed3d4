#pragma once

#include <cstdint>
#include <string>

namespace icltemp {

// Self-contained numerical cross-checks, runnable from the command line.
// Each oracle verifies a closed-form result against an independent route
// (brute-force sampling, direct map comparison, or a grid scan).

struct OracleOutcome {
  std::string name;
  bool pass = false;
  double measured = 0.0;  // worst observed deviation, in units of the bound
  std::string detail;
};

// E[S A S] for an empirical second-moment matrix S against brute-force Monte
// Carlo at d = 3 (entrywise within 4 standard errors), plus the exact
// identity-substitution value to 1e-12.
OracleOutcome oracle_moments(long n_draws, std::uint64_t seed);

// Gap between softmax and its linearization over random score vectors with
// ||z/tau||_inf <= 0.1: bounded by 0.5 ||z/tau||_inf^2 + 1e-9, and the
// linearized output sums to one within 1e-12.
OracleOutcome oracle_taylor(long trials, std::uint64_t seed);

// The closed-form optimal temperature beats a 400-point log grid over
// [1e-2, 1e2] for random defined error curves.
OracleOutcome oracle_argmin(long trials, std::uint64_t seed);

}  // namespace icltemp
