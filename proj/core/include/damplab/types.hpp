#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace damplab {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using rvec = std::vector<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Thrown when an input vector does not match the grid it is used with.
class LengthMismatch : public std::invalid_argument {
 public:
  LengthMismatch(const std::string& what, std::size_t got, std::size_t expected)
      : std::invalid_argument(what + ": length " + std::to_string(got) + ", expected " +
                              std::to_string(expected)) {}
};

inline void require_length(std::size_t got, std::size_t expected, const char* what) {
  if (got != expected) throw LengthMismatch(what, got, expected);
}

/// Pairwise (cascade) summation; fixed evaluation order for reproducible reductions.
template <class T>
T pairwise_sum(std::span<const T> x) {
  if (x.size() <= 16) {
    T s{};
    for (const T& v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

}  // namespace damplab
