#pragma once

#include <cstdint>

namespace icltemp {

namespace detail {

// Weyl increment and finalizer constants of splitmix64 (Steele/Lea/Vigna).
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Addressable random stream.  The generator is counter-based: its state is a
// 64-bit key derived from (master_seed, stream_id) plus a Weyl counter, and
// the output function is the splitmix64 finalizer.  Any stream can therefore
// be reconstructed independently on any worker, and the same pair always
// yields the same sequence.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  // Deterministically derived stream; distinct salts give streams that are
  // independent for all practical purposes.
  [[nodiscard]] constexpr RngStream child(std::uint64_t salt) const {
    return {master_seed,
            detail::mix64(stream_id + detail::kGoldenGamma) ^
                detail::mix64(salt + 2 * detail::kGoldenGamma)};
  }

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

// Normal quantile function, Wichura's algorithm AS 241 (PPND16 variant).
// Absolute error below 1e-15 for p in (0, 1); returns +/-infinity at the
// endpoints.
double inverse_normal_cdf(double p);

class RandomEngine {
 public:
  explicit constexpr RandomEngine(RngStream s)
      : state_(detail::mix64(s.master_seed + detail::kGoldenGamma) ^
               detail::mix64(s.stream_id + 3 * detail::kGoldenGamma)) {}

  constexpr std::uint64_t next_u64() {
    state_ += detail::kGoldenGamma;
    return detail::mix64(state_);
  }

  // Uniform on the open interval (0,1) with 53-bit resolution.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the inverse-CDF transform.  This is the one and only
  // normal generator in the project: seeded results depend on it.
  double normal() { return inverse_normal_cdf(uniform01()); }

 private:
  std::uint64_t state_;
};

}  // namespace icltemp
