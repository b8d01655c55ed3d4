#pragma once

#include "icltemp/attention.hpp"
#include "icltemp/prompt.hpp"
#include "icltemp/rng.hpp"
#include "icltemp/types.hpp"

namespace icltemp {

// Randomized well-conditioned instances for oracles and randomized checks.

Matrix random_orthogonal(Index d, RandomEngine& engine);

// Q diag(lambda) Q^T with eigenvalues uniform in [lo, hi].
Matrix random_psd(Index d, double lo, double hi, RandomEngine& engine);

GaussianSpec random_gaussian_spec(Index d, double mean_scale, double lo,
                                  double hi, RandomEngine& engine);

DataDistribution random_data_distribution(Index d, RandomEngine& engine);

// Norm-compliant random attention weights: ||M11|| <= c d, m21 = 0,
// ||v21|| <= c/(d l), 0 < v22 <= c/d, tau in [0.5, 2].
AttentionParams random_compliant_params(Index d, Index l, double c,
                                        RandomEngine& engine);

}  // namespace icltemp
