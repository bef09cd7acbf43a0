#include "damplab/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "damplab/parallel.hpp"
#include "damplab/rng.hpp"

namespace damplab {

namespace {

double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {  // sum conj(a) b
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

StationaryOperator::StationaryOperator(double q, double E, std::span<const double> damping,
                                       const CircleGrid& grid)
    : q_(q), E_(E), w_(damping.begin(), damping.end()), grid_(grid) {
  require_length(damping.size(), grid.n(), "StationaryOperator damping");
  if (!(q >= 0.0) || !std::isfinite(E)) throw std::invalid_argument("StationaryOperator: need q >= 0, finite E");
  const std::size_t n = grid.n();

  double wmax = 0.0, wsum = 0.0;
  for (double w : w_) {
    wmax = std::max(wmax, std::abs(w));
    wsum += w;
  }
  double smax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = -grid.diff2_symbol(FourierTransform::wavenumber(i, n));
    smax = std::max(smax, std::abs(s - E));
  }
  norm_bound_ = smax + q * wmax;

  if (grid.scheme() == DiffScheme::Fd2) {
    const double h2 = grid.h() * grid.h();
    cvec lower(n, cplx{-1.0 / h2, 0.0}), upper(n, cplx{-1.0 / h2, 0.0}), diag(n);
    for (std::size_t j = 0; j < n; ++j) diag[j] = cplx{2.0 / h2 - E, q * w_[j]};
    lu_.emplace(lower, diag, upper);
  } else {
    const double wmean = wsum / static_cast<double>(n);
    precond_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx p{-grid.diff2_symbol(FourierTransform::wavenumber(i, n)) - E, q * wmean};
      precond_[i] = std::abs(p) > 1e-12 * (1.0 + std::abs(E)) ? 1.0 / p : cplx{1.0, 0.0};
    }
  }
}

cvec StationaryOperator::apply_impl(std::span<const cplx> u, bool adjoint) const {
  require_length(u.size(), grid_.n(), "StationaryOperator::apply");
  cvec out = diff2_apply(u, grid_);
  const double sign = adjoint ? -1.0 : 1.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = -out[j] + cplx{-E_, sign * q_ * w_[j]} * u[j];
  }
  return out;
}

cvec StationaryOperator::apply(std::span<const cplx> u) const { return apply_impl(u, false); }
cvec StationaryOperator::apply_adjoint(std::span<const cplx> u) const { return apply_impl(u, true); }

double StationaryOperator::backward_error(std::span<const cplx> u, std::span<const cplx> f,
                                          bool adjoint) const {
  cvec r = apply_impl(u, adjoint);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] -= f[j];
  const double denom = norm_bound_ * norm2(u) + norm2(f);
  return denom > 0.0 ? norm2(r) / denom : 0.0;
}

cvec StationaryOperator::direct_solve(std::span<const cplx> f, bool adjoint) const {
  cvec x(f.begin(), f.end());
  if (adjoint) {
    lu_->solve_adjoint_in_place(x);
  } else {
    lu_->solve_in_place(x);
  }
  return x;
}

cvec StationaryOperator::gmres_solve(std::span<const cplx> f, bool adjoint, double target) const {
  // Right-preconditioned restarted GMRES: A P^{-1} y = f, x = P^{-1} y.
  const std::size_t n = grid_.n();
  const std::size_t restart = std::min<std::size_t>(150, n);
  const std::size_t max_iter = 20 * n + 2000;
  const FourierTransform& fft = grid_.fft();
  const double inv_n = 1.0 / static_cast<double>(n);

  auto precondition = [&](std::span<const cplx> v) {
    cvec hat = fft.forward(v);
    for (std::size_t i = 0; i < n; ++i) hat[i] *= (adjoint ? std::conj(precond_[i]) : precond_[i]) * inv_n;
    return fft.inverse(hat);
  };

  cvec x(n, cplx{});
  const double fnorm = norm2(f);
  if (fnorm == 0.0) return x;

  std::size_t total = 0;
  double last_rel = 1.0;
  while (total < max_iter) {
    cvec r = apply_impl(x, adjoint);
    for (std::size_t j = 0; j < n; ++j) r[j] = f[j] - r[j];
    const double beta = norm2(r);
    last_rel = beta / fnorm;
    if (backward_error(x, f, adjoint) <= 0.25 * target) return x;

    std::vector<cvec> V;
    V.reserve(restart + 1);
    V.emplace_back(r);
    for (auto& z : V[0]) z /= beta;
    std::vector<cvec> H(restart + 1, cvec(restart, cplx{}));
    // Givens rotations [c s; -conj(s) c] with real c.
    rvec cs(restart);
    cvec sn(restart), g(restart + 1, cplx{});
    g[0] = beta;
    std::size_t used = 0;
    for (std::size_t j = 0; j < restart && total < max_iter; ++j, ++total) {
      cvec wv = apply_impl(precondition(V[j]), adjoint);
      for (std::size_t i = 0; i <= j; ++i) {
        H[i][j] = dot(V[i], wv);
        for (std::size_t l = 0; l < n; ++l) wv[l] -= H[i][j] * V[i][l];
      }
      const double hn = norm2(wv);
      H[j + 1][j] = hn;
      for (std::size_t i = 0; i < j; ++i) {
        const cplx t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
        H[i + 1][j] = -std::conj(sn[i]) * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double a = std::abs(H[j][j]);
      const double r = std::hypot(a, hn);
      if (a == 0.0) {
        cs[j] = 0.0;
        sn[j] = 1.0;
      } else {
        cs[j] = a / r;
        sn[j] = (H[j][j] / a) * (hn / r);
      }
      H[j][j] = cs[j] * H[j][j] + sn[j] * hn;
      H[j + 1][j] = 0.0;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];
      used = j + 1;
      if (std::abs(g[j + 1]) <= 1e-3 * target * fnorm || hn == 0.0) break;
      V.emplace_back(wv);
      for (auto& z : V.back()) z /= hn;
    }
    // Back substitution H y = g.
    cvec y(used);
    for (std::size_t ii = used; ii-- > 0;) {
      cplx s = g[ii];
      for (std::size_t l = ii + 1; l < used; ++l) s -= H[ii][l] * y[l];
      y[ii] = s / H[ii][ii];
    }
    cvec update(n, cplx{});
    for (std::size_t i = 0; i < used; ++i) {
      for (std::size_t l = 0; l < n; ++l) update[l] += y[i] * V[i][l];
    }
    update = precondition(update);
    for (std::size_t l = 0; l < n; ++l) x[l] += update[l];
  }
  std::ostringstream os;
  os << "GMRES did not reach backward error " << target << " after " << total
     << " iterations (relative residual " << last_rel << ")";
  throw SingularSystem(os.str());
}

cvec StationaryOperator::solve(std::span<const cplx> f, bool adjoint, double target) const {
  require_length(f.size(), grid_.n(), "StationaryOperator::solve");
  if (!lu_) {
    cvec x = gmres_solve(f, adjoint, target);
    const double err = backward_error(x, f, adjoint);
    if (!(err <= target)) {
      std::ostringstream os;
      os << "matrix-free solve: backward error " << err << " above target " << target;
      throw SingularSystem(os.str());
    }
    return x;
  }
  cvec x = direct_solve(f, adjoint);
  double err = backward_error(x, f, adjoint);
  for (int step = 0; step < 3 && err > 0.01 * target; ++step) {
    cvec r = apply_impl(x, adjoint);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = f[j] - r[j];
    const cvec dx = direct_solve(r, adjoint);
    cvec trial = x;
    for (std::size_t j = 0; j < x.size(); ++j) trial[j] += dx[j];
    const double trial_err = backward_error(trial, f, adjoint);
    if (!(trial_err < err)) break;
    x = std::move(trial);
    err = trial_err;
  }
  if (!(err <= target)) {
    std::ostringstream os;
    os << "banded solve: backward error " << err << " above target " << target
       << " (smallest pivot " << lu_->min_pivot() << ")";
    throw SingularSystem(os.str());
  }
  return x;
}

cvec StationaryOperator::solve_unrefined(std::span<const cplx> f, bool adjoint) const {
  require_length(f.size(), grid_.n(), "StationaryOperator::solve_unrefined");
  return lu_ ? direct_solve(f, adjoint) : solve(f, adjoint);
}

StationaryOperator build_operator(double q, double E, std::span<const double> damping,
                                  const CircleGrid& grid) {
  return {q, E, damping, grid};
}

StationarySolve solve(const StationaryOperator& op, std::span<const cplx> f, double target) {
  StationarySolve s;
  s.q = op.q();
  s.E = op.E();
  s.grid = op.grid();
  s.damping.assign(op.damping().begin(), op.damping().end());
  s.f.assign(f.begin(), f.end());
  s.u = op.solve(f, false, target);
  s.residual = op.backward_error(s.u, s.f);
  return s;
}

namespace {

// Modified Gram-Schmidt, in order; a column that collapses is replaced by a
// fresh random direction so the block keeps full rank.
void orthonormalize(std::vector<cvec>& block, SplitMix64& rng) {
  for (std::size_t i = 0; i < block.size(); ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < i; ++j) {
        const cplx c = dot(block[j], block[i]);
        for (std::size_t l = 0; l < block[i].size(); ++l) block[i][l] -= c * block[j][l];
      }
      const double nrm = norm2(block[i]);
      if (nrm > 1e-300) {
        for (auto& z : block[i]) z /= nrm;
        break;
      }
      block[i] = complex_gaussian_vector(block[i].size(), rng);
    }
  }
}

}  // namespace

ResolventPoint resolvent_norm_1d(const StationaryOperator& op, const ResolventOptions& options) {
  const std::size_t n = op.grid().n();
  const std::size_t b = std::clamp<std::size_t>(options.block, 1, n);
  SplitMix64 rng(options.seed);
  std::vector<cvec> V(b);
  for (auto& v : V) v = complex_gaussian_vector(n, rng);
  orthonormalize(V, rng);

  ResolventPoint pt;
  pt.q = op.q();
  pt.E = op.E();
  pt.n = n;
  pt.scheme = op.grid().scheme();
  double previous = 0.0, estimate = 0.0;
  std::vector<cvec> Y(b);
  Eigen::MatrixXcd gram(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b));
  for (int it = 1; it <= options.max_iter; ++it) {
    for (std::size_t i = 0; i < b; ++i) Y[i] = op.solve_unrefined(V[i], false);
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t j = i; j < b; ++j) {
        const cplx g = dot(Y[i], Y[j]);
        gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g;
        gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(g);
      }
    }
    // Rayleigh-Ritz on span(V): Ritz values of (A A^H)^{-1} are the
    // eigenvalues of Y^H Y, each a lower bound for the true ones.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
    const auto& lambda = eig.eigenvalues();
    const auto& U = eig.eigenvectors();
    estimate = std::sqrt(std::max(lambda(static_cast<Eigen::Index>(b) - 1), 0.0));
    pt.iterations = it;

    // Rotate to Ritz vectors, strongest first.
    std::vector<cvec> Yr(b, cvec(n)), Vr(b, cvec(n));
    for (std::size_t c = 0; c < b; ++c) {
      const auto col = static_cast<Eigen::Index>(b - 1 - c);
      for (std::size_t i = 0; i < b; ++i) {
        const cplx w = U(static_cast<Eigen::Index>(i), col);
        for (std::size_t l = 0; l < n; ++l) {
          Yr[c][l] += w * Y[i][l];
          Vr[c][l] += w * V[i][l];
        }
      }
    }
    if (it > 1 && std::abs(estimate - previous) < options.tol * estimate) {
      pt.norm = estimate;
      pt.residual = op.backward_error(Yr[0], Vr[0]);
      return pt;
    }
    previous = estimate;
    for (std::size_t c = 0; c < b; ++c) V[c] = op.solve_unrefined(Yr[c], true);
    for (const auto& v : V) {
      if (!std::isfinite(norm2(v))) throw NonConvergence("inverse iteration breakdown", previous, estimate);
    }
    orthonormalize(V, rng);
  }
  std::ostringstream os;
  os << "inverse iteration did not converge in " << options.max_iter << " iterations (q=" << op.q()
     << ", E=" << op.E() << ")";
  throw NonConvergence(os.str(), previous, estimate);
}

ResolventPoint resolvent_norm_1d(double q, double E, std::span<const double> damping,
                                 const CircleGrid& grid, const ResolventOptions& options) {
  return resolvent_norm_1d(StationaryOperator(q, E, damping, grid), options);
}

ResolventPoint resolvent_norm_1d(double q, double E, const DampingProfile& profile,
                                 const CircleGrid& grid, const ResolventOptions& options) {
  const rvec w = sample_on_grid(profile, grid);
  return resolvent_norm_1d(q, E, w, grid, options);
}

Resolvent2d resolvent_norm_2d(double q, std::span<const double> damping, const CircleGrid& grid,
                              double E_cut, const ResolventOptions& options) {
  if (!(q >= options.q_min)) {
    throw std::invalid_argument("resolvent_norm_2d: q below q_min");
  }
  if (!(E_cut >= 0.0)) throw std::invalid_argument("resolvent_norm_2d: E_cut must be >= 0");
  const auto kmax = static_cast<long>(std::floor(std::sqrt(q * q + E_cut)));
  Resolvent2d out;
  out.modes.resize(static_cast<std::size_t>(kmax + 1));
  parallel_for(out.modes.size(), options.jobs, [&](std::size_t i) {
    const auto k = static_cast<long>(i);
    const double kd = static_cast<double>(k);
    ResolventPoint pt = resolvent_norm_1d(q, q * q - kd * kd, damping, grid, options);
    pt.k = k;
    out.modes[i] = std::move(pt);
  });
  out.best = *std::max_element(out.modes.begin(), out.modes.end(),
                               [](const auto& a, const auto& b) { return a.norm < b.norm; });
  return out;
}

Resolvent2d resolvent_norm_2d(double q, const DampingProfile& profile, const CircleGrid& grid,
                              double E_cut, const ResolventOptions& options) {
  const rvec w = sample_on_grid(profile, grid);
  return resolvent_norm_2d(q, w, grid, E_cut, options);
}

ResonantPeak resonant_peak_2d(double q_nominal, const DampingProfile& profile,
                              const CircleGrid& grid, double E_cut,
                              const ResolventOptions& options, const ResonantPeakOptions& peak) {
  if (peak.scan_points < 3) throw std::invalid_argument("resonant_peak_2d: need >= 3 scan points");
  const rvec w = sample_on_grid(profile, grid);
  const double strip_level = std::pow(kPi / (2.0 * profile.sigma()), 2);
  const double e_hi = peak.scan_max.value_or(4.0 * strip_level);
  const long k = std::lround(q_nominal);
  const double kd = static_cast<double>(k);

  auto norm_at = [&](double E) {
    return resolvent_norm_1d(std::sqrt(kd * kd + E), E, w, grid, options).norm;
  };

  const std::size_t m = peak.scan_points;
  rvec Es(m), vals(m);
  for (std::size_t i = 0; i < m; ++i) Es[i] = e_hi * static_cast<double>(i) / static_cast<double>(m - 1);
  parallel_for(m, options.jobs, [&](std::size_t i) { vals[i] = norm_at(Es[i]); });
  const std::size_t imax =
      static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());

  // Golden-section refinement on the bracketing cells.
  double a = Es[imax == 0 ? 0 : imax - 1];
  double b = Es[std::min(imax + 1, m - 1)];
  constexpr double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = norm_at(c), fd = norm_at(d);
  while (b - a > peak.E_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = norm_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = norm_at(d);
    }
  }
  double E_best = Es[imax], best = vals[imax];
  if (fc > best) { E_best = c; best = fc; }
  if (fd > best) { E_best = d; best = fd; }

  ResonantPeak out;
  out.q_nominal = q_nominal;
  out.k = k;
  out.E_peak = E_best;
  out.q_peak = std::sqrt(kd * kd + E_best);
  out.peak_norm_1d = best;
  out.at_peak = resolvent_norm_2d(out.q_peak, w, grid, E_cut, options);
  return out;
}

FitResult fit_exponent(std::span<const double> q, std::span<const double> norm) {
  if (q.size() < 3) throw std::invalid_argument("fit_exponent: need at least 3 points");
  return fit_power_law(q, norm);
}

FitResult fit_exponent(std::span<const ResolventPoint> points) {
  rvec q, v;
  for (const auto& p : points) {
    q.push_back(p.q);
    v.push_back(p.norm);
  }
  return fit_exponent(q, v);
}

}  // namespace damplab
