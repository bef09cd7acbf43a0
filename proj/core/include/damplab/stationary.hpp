#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "damplab/circle_grid.hpp"
#include "damplab/cyclic_tridiagonal.hpp"
#include "damplab/damping.hpp"
#include "damplab/power_fit.hpp"

namespace damplab {

/// Discretization of A = -d^2/dx^2 + i q W - E on the circle.
///
/// The fd2 scheme keeps a cyclic tridiagonal LU factorization, so solves with
/// A and A^H are direct and O(n). Fourier and fd4 are matrix free; solves run
/// right-preconditioned GMRES with the constant-coefficient symbol
/// (-D2 + i q mean(W) - E) as preconditioner.
class StationaryOperator {
 public:
  StationaryOperator(double q, double E, std::span<const double> damping, const CircleGrid& grid);

  double q() const noexcept { return q_; }
  double E() const noexcept { return E_; }
  const CircleGrid& grid() const noexcept { return grid_; }
  std::span<const double> damping() const noexcept { return w_; }
  bool banded() const noexcept { return lu_.has_value(); }

  cvec apply(std::span<const cplx> u) const;
  cvec apply_adjoint(std::span<const cplx> u) const;

  /// Upper bound on the spectral norm: max_m |symbol_m - E| + q max W.
  double norm_bound() const noexcept { return norm_bound_; }

  /// Normwise backward error ||A u - f|| / (||A|| ||u|| + ||f||).
  double backward_error(std::span<const cplx> u, std::span<const cplx> f, bool adjoint = false) const;

  /// A^{-1} f (or A^{-H} f), refined until the backward error is <= target.
  /// Throws SingularSystem with diagnostics if the target cannot be reached.
  cvec solve(std::span<const cplx> f, bool adjoint = false, double target = 1e-10) const;

  /// Single factored solve without the residual check (banded), used by
  /// inverse iteration where backward stability is all that matters.
  /// Matrix-free operators fall back to solve().
  cvec solve_unrefined(std::span<const cplx> f, bool adjoint = false) const;

  /// Smallest pivot of the banded factorization, or 0 for matrix-free operators.
  double min_pivot() const noexcept { return lu_ ? lu_->min_pivot() : 0.0; }

 private:
  cvec apply_impl(std::span<const cplx> u, bool adjoint) const;
  cvec direct_solve(std::span<const cplx> f, bool adjoint) const;
  cvec gmres_solve(std::span<const cplx> f, bool adjoint, double target) const;

  double q_;
  double E_;
  rvec w_;
  CircleGrid grid_;
  std::optional<CyclicTridiagonalLU> lu_;
  cvec precond_;  // 1 / (-symbol_m + i q mean(W) - E), Fourier ordering
  double norm_bound_ = 0.0;
};

StationaryOperator build_operator(double q, double E, std::span<const double> damping,
                                  const CircleGrid& grid);

/// One accepted solve of -u'' + i q W u - E u = f.
struct StationarySolve {
  double q = 0.0;
  double E = 0.0;
  CircleGrid grid{8};
  rvec damping;
  cvec f;
  cvec u;
  /// Normwise backward error of u (see StationaryOperator::backward_error).
  double residual = 0.0;
};

StationarySolve solve(const StationaryOperator& op, std::span<const cplx> f, double target = 1e-10);

/// Thrown when inverse iteration runs out of iterations.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double previous, double last)
      : std::runtime_error(what), previous_estimate(previous), last_estimate(last) {}
  double previous_estimate;
  double last_estimate;
};

struct ResolventOptions {
  double tol = 1e-6;
  int max_iter = 500;
  /// Block size of the inverse subspace iteration. W is even in x, so singular
  /// values of A come in near-degenerate even/odd pairs; a block of 4 keeps
  /// the convergence rate at (sigma_5 / sigma_1)^2 instead of (sigma_2 / sigma_1)^2.
  std::size_t block = 4;
  std::uint64_t seed = 0x5EEDULL;
  /// resolvent_norm_2d refuses frequencies below this.
  double q_min = 4.0;
  /// Worker threads for k sweeps and peak scans (0 = hardware concurrency).
  unsigned jobs = 1;
};

struct ResolventPoint {
  double q = 0.0;
  double E = 0.0;
  std::optional<long> k;
  std::size_t n = 0;
  DiffScheme scheme = DiffScheme::Fd2;
  double norm = 0.0;
  std::string method = "inverse-iteration";
  double residual = 0.0;
  int iterations = 0;
};

/// ||A^{-1}|| = 1/sigma_min(A) by block inverse iteration on (A A^H)^{-1}
/// with Rayleigh-Ritz, using only solves with A and A^H. Converged when two
/// successive estimates differ by less than options.tol relative.
ResolventPoint resolvent_norm_1d(const StationaryOperator& op, const ResolventOptions& options = {});
ResolventPoint resolvent_norm_1d(double q, double E, std::span<const double> damping,
                                 const CircleGrid& grid, const ResolventOptions& options = {});
ResolventPoint resolvent_norm_1d(double q, double E, const DampingProfile& profile,
                                 const CircleGrid& grid, const ResolventOptions& options = {});

struct Resolvent2d {
  ResolventPoint best;              // maximizing mode, k set
  std::vector<ResolventPoint> modes;  // k = 0, 1, ..., in order
};

/// Torus resolvent norm ||(-Delta + i q W - q^2)^{-1}|| through the exact
/// Fourier reduction in y: the sup over integer k of the 1D norm at
/// E = q^2 - k^2. Modes with E < -E_cut are skipped; each contributes at
/// most 1/|E| <= 1/E_cut.
Resolvent2d resolvent_norm_2d(double q, std::span<const double> damping, const CircleGrid& grid,
                              double E_cut = 1.0, const ResolventOptions& options = {});
Resolvent2d resolvent_norm_2d(double q, const DampingProfile& profile, const CircleGrid& grid,
                              double E_cut = 1.0, const ResolventOptions& options = {});

struct ResonantPeakOptions {
  /// E scan covers [0, scan_max]; default 4 (pi / (2 sigma))^2, i.e. the two
  /// lowest Dirichlet levels of the undamped strip |x| < sigma.
  std::optional<double> scan_max;
  std::size_t scan_points = 400;
  double E_tol = 1e-7;
};

struct ResonantPeak {
  double q_nominal = 0.0;
  long k = 0;
  double E_peak = 0.0;       // q_peak^2 - k^2
  double q_peak = 0.0;
  double peak_norm_1d = 0.0;
  Resolvent2d at_peak;        // full torus evaluation at q_peak
};

/// Locates the torus frequency q' in [q, sqrt(q^2 + scan_max)] with k = round(q)
/// that maximizes the 1D norm at E = q'^2 - k^2, then evaluates
/// resolvent_norm_2d at q'.
///
/// At integer q every E = q^2 - k^2 is an integer and misses the strip
/// resonances, so the torus norm stays O(1); the peak sampler measures the
/// envelope the resolvent bound actually controls.
ResonantPeak resonant_peak_2d(double q_nominal, const DampingProfile& profile,
                              const CircleGrid& grid, double E_cut = 1.0,
                              const ResolventOptions& options = {},
                              const ResonantPeakOptions& peak = {});

/// Log-log least squares of norm against q. Needs >= 3 points with distinct q.
FitResult fit_exponent(std::span<const ResolventPoint> points);
FitResult fit_exponent(std::span<const double> q, std::span<const double> norm);

}  // namespace damplab
