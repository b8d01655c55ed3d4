#include <cmath>
#include <set>

#include <doctest.h>

#include "icltemp/rng.hpp"

using namespace icltemp;

TEST_CASE("same stream reproduces the same sequence") {
  RandomEngine a(RngStream{123, 456});
  RandomEngine b(RngStream{123, 456});
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct streams and children differ") {
  RandomEngine a(RngStream{123, 456});
  RandomEngine b(RngStream{123, 457});
  RandomEngine c(RngStream{124, 456});
  CHECK(a.next_u64() != b.next_u64());
  CHECK(a.next_u64() != c.next_u64());

  const RngStream base{1, 2};
  std::set<std::uint64_t> ids;
  for (std::uint64_t salt = 0; salt < 1000; ++salt) {
    ids.insert(base.child(salt).stream_id);
  }
  CHECK(ids.size() == 1000);
  CHECK(base.child(3).child(4).stream_id != base.child(4).child(3).stream_id);
}

TEST_CASE("uniform01 stays inside the open interval") {
  RandomEngine engine(RngStream{7, 0});
  for (int i = 0; i < 100000; ++i) {
    const double u = engine.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal quantile matches the normal CDF") {
  // Round trip through Phi(x) = erfc(-x/sqrt(2))/2.
  double worst = 0.0;
  for (int i = 1; i < 4000; ++i) {
    const double p = i / 4000.0;
    const double x = inverse_normal_cdf(p);
    const double back = 0.5 * std::erfc(-x / std::sqrt(2.0));
    worst = std::max(worst, std::abs(back - p));
  }
  CHECK(worst < 1e-13);

  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(inverse_normal_cdf(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.025) ==
        doctest::Approx(-1.959963984540054).epsilon(1e-12));
  CHECK(std::isinf(inverse_normal_cdf(0.0)));
  CHECK(std::isinf(inverse_normal_cdf(1.0)));
  // Deep tail branch.
  CHECK(0.5 * std::erfc(-inverse_normal_cdf(1e-12) / std::sqrt(2.0)) ==
        doctest::Approx(1e-12).epsilon(1e-3));
}

TEST_CASE("normal draws have the right first two moments") {
  RandomEngine engine(RngStream{99, 1});
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = engine.normal();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}
