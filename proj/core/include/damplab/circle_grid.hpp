#pragma once

#include <optional>
#include <string_view>

#include "damplab/fourier.hpp"
#include "damplab/types.hpp"

namespace damplab {

enum class DiffScheme { Fourier, Fd2, Fd4 };

std::string_view to_string(DiffScheme scheme) noexcept;
std::optional<DiffScheme> parse_scheme(std::string_view name) noexcept;

/// Uniform grid on R/2piZ with nodes x_j = -pi + j*h, h = 2pi/n.
///
/// The node count is even and at least 8. Copies share the FFT plans.
class CircleGrid {
 public:
  explicit CircleGrid(std::size_t n, DiffScheme scheme = DiffScheme::Fourier);

  std::size_t n() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  DiffScheme scheme() const noexcept { return scheme_; }
  double node(std::size_t j) const noexcept { return -kPi + static_cast<double>(j) * h_; }
  rvec nodes() const;

  /// Same nodes, different differentiation scheme.
  CircleGrid with_scheme(DiffScheme scheme) const;

  const FourierTransform& fft() const noexcept { return fft_; }

  /// Eigenvalue of the scheme's second-derivative operator on exp(i m x).
  double diff2_symbol(long m) const noexcept;

  bool operator==(const CircleGrid& other) const noexcept {
    return n_ == other.n_ && scheme_ == other.scheme_;
  }

 private:
  std::size_t n_;
  double h_;
  DiffScheme scheme_;
  FourierTransform fft_;
};

/// Approximates u'. The Fourier scheme zeroes the Nyquist coefficient.
cvec diff_apply(std::span<const cplx> u, const CircleGrid& grid);

/// Approximates u''. Fourier multiplies mode m by -m^2 (Nyquist included);
/// fd2 and fd4 are the periodic 3- and 5-point central stencils.
cvec diff2_apply(std::span<const cplx> u, const CircleGrid& grid);

/// Rectangle rule h * sum_j g_j, exact for trigonometric polynomials of degree < n.
cplx integrate(std::span<const cplx> g, const CircleGrid& grid);
double integrate(std::span<const double> g, const CircleGrid& grid);

}  // namespace damplab
