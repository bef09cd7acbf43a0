#include "damplab/circle_grid.hpp"

#include <cmath>

namespace damplab {

std::string_view to_string(DiffScheme scheme) noexcept {
  switch (scheme) {
    case DiffScheme::Fourier: return "fourier";
    case DiffScheme::Fd2: return "fd2";
    case DiffScheme::Fd4: return "fd4";
  }
  return "unknown";
}

std::optional<DiffScheme> parse_scheme(std::string_view name) noexcept {
  if (name == "fourier") return DiffScheme::Fourier;
  if (name == "fd2") return DiffScheme::Fd2;
  if (name == "fd4") return DiffScheme::Fd4;
  return std::nullopt;
}

CircleGrid::CircleGrid(std::size_t n, DiffScheme scheme)
    : n_(n), h_(kTwoPi / static_cast<double>(n)), scheme_(scheme), fft_(n == 0 ? 1 : n) {
  if (n < 8 || n % 2 != 0) {
    throw std::invalid_argument("CircleGrid: n must be even and >= 8, got " + std::to_string(n));
  }
}

rvec CircleGrid::nodes() const {
  rvec x(n_);
  for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
  return x;
}

CircleGrid CircleGrid::with_scheme(DiffScheme scheme) const {
  CircleGrid g = *this;
  g.scheme_ = scheme;
  return g;
}

double CircleGrid::diff2_symbol(long m) const noexcept {
  const double mm = static_cast<double>(m);
  switch (scheme_) {
    case DiffScheme::Fourier: return -mm * mm;
    case DiffScheme::Fd2: return -(2.0 - 2.0 * std::cos(mm * h_)) / (h_ * h_);
    case DiffScheme::Fd4: {
      const double c1 = std::cos(mm * h_), c2 = std::cos(2.0 * mm * h_);
      return (-2.0 * c2 + 32.0 * c1 - 30.0) / (12.0 * h_ * h_);
    }
  }
  return 0.0;
}

namespace {

cvec spectral_multiply(std::span<const cplx> u, const CircleGrid& grid, bool second) {
  const std::size_t n = grid.n();
  cvec hat = grid.fft().forward(u);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long m = FourierTransform::wavenumber(i, n);
    const double mm = static_cast<double>(m);
    if (second) {
      hat[i] *= -mm * mm * inv_n;
    } else {
      hat[i] *= (2 * static_cast<std::size_t>(std::abs(m)) == n) ? cplx{} : cplx{0.0, mm * inv_n};
    }
  }
  return grid.fft().inverse(hat);
}

}  // namespace

cvec diff_apply(std::span<const cplx> u, const CircleGrid& grid) {
  require_length(u.size(), grid.n(), "diff_apply");
  const std::size_t n = grid.n();
  const double h = grid.h();
  cvec out(n);
  auto at = [&](std::size_t j, long off) {
    return u[(j + n + static_cast<std::size_t>(off + static_cast<long>(n))) % n];
  };
  switch (grid.scheme()) {
    case DiffScheme::Fourier: return spectral_multiply(u, grid, false);
    case DiffScheme::Fd2:
      for (std::size_t j = 0; j < n; ++j) out[j] = (at(j, 1) - at(j, -1)) / (2.0 * h);
      break;
    case DiffScheme::Fd4:
      for (std::size_t j = 0; j < n; ++j) {
        out[j] = (-at(j, 2) + 8.0 * at(j, 1) - 8.0 * at(j, -1) + at(j, -2)) / (12.0 * h);
      }
      break;
  }
  return out;
}

cvec diff2_apply(std::span<const cplx> u, const CircleGrid& grid) {
  require_length(u.size(), grid.n(), "diff2_apply");
  const std::size_t n = grid.n();
  const double h2 = grid.h() * grid.h();
  cvec out(n);
  auto at = [&](std::size_t j, long off) {
    return u[(j + n + static_cast<std::size_t>(off + static_cast<long>(n))) % n];
  };
  switch (grid.scheme()) {
    case DiffScheme::Fourier: return spectral_multiply(u, grid, true);
    case DiffScheme::Fd2:
      for (std::size_t j = 0; j < n; ++j) out[j] = (at(j, 1) - 2.0 * u[j] + at(j, -1)) / h2;
      break;
    case DiffScheme::Fd4:
      for (std::size_t j = 0; j < n; ++j) {
        out[j] = (-at(j, 2) + 16.0 * at(j, 1) - 30.0 * u[j] + 16.0 * at(j, -1) - at(j, -2)) /
                 (12.0 * h2);
      }
      break;
  }
  return out;
}

cplx integrate(std::span<const cplx> g, const CircleGrid& grid) {
  require_length(g.size(), grid.n(), "integrate");
  return grid.h() * pairwise_sum(g);
}

double integrate(std::span<const double> g, const CircleGrid& grid) {
  require_length(g.size(), grid.n(), "integrate");
  return grid.h() * pairwise_sum(g);
}

}  // namespace damplab
