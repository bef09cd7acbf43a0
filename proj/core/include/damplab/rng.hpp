#pragma once

#include <cmath>
#include <cstdint>

#include "damplab/types.hpp"

namespace damplab {

/// SplitMix64 (Steele, Lea, Flood 2014). Counter based: state advances by the
/// golden-ratio increment, output is a fixed 64-bit mix. Identical streams on
/// every platform, unlike std::normal_distribution.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  /// Independent stream for work item `index` under a run seed.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) noexcept {
    SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    g.next();
    return g;
  }

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (both variates used).
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  /// Complex Gaussian with independent N(0,1) real and imaginary parts.
  cplx complex_normal() noexcept {
    const double re = normal();
    return {re, normal()};
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline cvec complex_gaussian_vector(std::size_t n, SplitMix64& rng) {
  cvec v(n);
  for (auto& z : v) z = rng.complex_normal();
  return v;
}

}  // namespace damplab
