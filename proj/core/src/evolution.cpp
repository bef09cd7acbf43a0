#include "damplab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "damplab/parallel.hpp"

namespace damplab {

WaveField WaveField::from(const InitialData& data) {
  WaveField f;
  f.grid = data.grid;
  f.modes = data.modes;
  for (const auto& m : f.modes) {
    require_length(m.v.size(), f.grid.n(), "WaveField v");
    require_length(m.w.size(), f.grid.n(), "WaveField w");
  }
  return f;
}

InitialData gaussian_strip(const CircleGrid& grid, long k, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_strip: width must be positive");
  InitialData d;
  d.family = "gaussian-strip";
  d.grid = grid;
  ModeField m;
  m.k = k;
  m.v.resize(grid.n());
  m.w.resize(grid.n());
  const cplx lift(0.0, std::sqrt(1.0 + static_cast<double>(k * k)));
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const double x = grid.node(j);
    m.v[j] = std::exp(-x * x / (2.0 * width * width));
    m.w[j] = lift * m.v[j];
  }
  d.modes.push_back(std::move(m));
  return d;
}

InitialData plane_wave(const CircleGrid& grid, long m, long k, cplx v0_amp, cplx w0_amp) {
  InitialData d;
  d.family = "plane-wave";
  d.grid = grid;
  ModeField f;
  f.k = k;
  f.v.resize(grid.n());
  f.w.resize(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const cplx e = std::polar(1.0, static_cast<double>(m) * grid.node(j));
    f.v[j] = v0_amp * e;
    f.w[j] = w0_amp * e;
  }
  d.modes.push_back(std::move(f));
  return d;
}

StrangStepper::StrangStepper(const CircleGrid& grid, std::span<const double> damping, double dt)
    : grid_(grid), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step: dt must be positive");
  require_length(damping.size(), grid.n(), "step damping");
  half_damp_.resize(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) half_damp_[j] = std::exp(-0.5 * dt * damping[j]);
  m2_.resize(grid.n());
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double m = static_cast<double>(FourierTransform::wavenumber(i, grid.n()));
    m2_[i] = m * m;
  }
}

void StrangStepper::advance(ModeField& mode) const {
  const std::size_t n = grid_.n();
  for (std::size_t j = 0; j < n; ++j) mode.w[j] *= half_damp_[j];

  cvec V = grid_.fft().forward(mode.v);
  cvec Wh = grid_.fft().forward(mode.w);
  const double k2 = static_cast<double>(mode.k * mode.k);
  for (std::size_t i = 0; i < n; ++i) {
    const double om2 = m2_[i] + k2;
    if (om2 == 0.0) {
      V[i] += Wh[i] * dt_;
      continue;
    }
    const double om = std::sqrt(om2);
    const double c = std::cos(om * dt_);
    const double s = std::sin(om * dt_);
    const cplx v = V[i];
    V[i] = c * v + (s / om) * Wh[i];
    Wh[i] = -om * s * v + c * Wh[i];
  }
  grid_.fft().inverse(V, mode.v);
  grid_.fft().inverse(Wh, mode.w);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    mode.v[j] *= inv_n;
    mode.w[j] *= inv_n * half_damp_[j];
  }
}

void StrangStepper::step(WaveField& state, unsigned jobs) const {
  if (state.grid.n() != grid_.n()) {
    throw LengthMismatch("StrangStepper grid", state.grid.n(), grid_.n());
  }
  parallel_for(state.modes.size(), jobs, [&](std::size_t i) { advance(state.modes[i]); });
  state.t += dt_;
}

void step(WaveField& state, double dt, std::span<const double> damping, unsigned jobs) {
  StrangStepper(state.grid, damping, dt).step(state, jobs);
}

namespace {

// Per-mode Fourier sums, combined in mode order.
double mode_energy_sum(const CircleGrid& grid, const ModeField& mode) {
  const cvec V = grid.fft().forward(mode.v);
  const cvec Wh = grid.fft().forward(mode.w);
  const double k2 = static_cast<double>(mode.k * mode.k);
  rvec terms(grid.n());
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double m = static_cast<double>(FourierTransform::wavenumber(i, grid.n()));
    terms[i] = std::norm(Wh[i]) + (m * m + k2) * std::norm(V[i]);
  }
  return pairwise_sum<double>(terms);
}

}  // namespace

double energy(const WaveField& state) {
  const double n = static_cast<double>(state.grid.n());
  rvec per_mode(state.modes.size());
  for (std::size_t i = 0; i < state.modes.size(); ++i) {
    per_mode[i] = mode_energy_sum(state.grid, state.modes[i]);
  }
  return kTwoPi * (kTwoPi / (n * n)) * pairwise_sum<double>(per_mode);
}

double sobolev_norm(const CircleGrid& grid, const std::vector<ModeField>& modes, int s, int which) {
  if (s < 0 || s > 2) throw std::invalid_argument("sobolev_norm: order must be 0, 1 or 2");
  const double n = static_cast<double>(grid.n());
  rvec per_mode(modes.size());
  for (std::size_t mi = 0; mi < modes.size(); ++mi) {
    const auto& src = which == 0 ? modes[mi].v : modes[mi].w;
    require_length(src.size(), grid.n(), "sobolev_norm");
    const cvec C = grid.fft().forward(src);
    const double k2 = static_cast<double>(modes[mi].k * modes[mi].k);
    rvec terms(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) {
      const double m = static_cast<double>(FourierTransform::wavenumber(i, grid.n()));
      terms[i] = std::pow(1.0 + m * m + k2, s) * std::norm(C[i] / n);
    }
    per_mode[mi] = pairwise_sum<double>(terms);
  }
  return kTwoPi * std::sqrt(pairwise_sum<double>(per_mode));
}

double sobolev_norm(const InitialData& data, int s, int which) {
  return sobolev_norm(data.grid, data.modes, s, which);
}

double data_norm(const InitialData& data) {
  return sobolev_norm(data, 2, 0) + sobolev_norm(data, 1, 1);
}

double literal_data_norm(const InitialData& data, std::span<const double> damping) {
  require_length(damping.size(), data.grid.n(), "literal_data_norm damping");
  std::vector<ModeField> accel = data.modes;
  const CircleGrid spectral = data.grid.with_scheme(DiffScheme::Fourier);
  for (auto& m : accel) {
    const cvec vxx = diff2_apply(m.v, spectral);
    const double k2 = static_cast<double>(m.k * m.k);
    for (std::size_t j = 0; j < m.v.size(); ++j) m.w[j] = vxx[j] - k2 * m.v[j] - damping[j] * m.w[j];
  }
  return sobolev_norm(data, 2, 0) + sobolev_norm(data.grid, accel, 1, 1);
}

std::pair<cplx, cplx> oracle_constant_damping(double c, double omega, cplx v0, cplx w0, double t) {
  if (!(c >= 0.0) || !(omega >= 0.0)) throw std::invalid_argument("oracle: need c >= 0, omega >= 0");
  // v = e^{-ct/2} (v0 C(t) + b S(t)), b = w0 + c v0 / 2, C'' = -kappa2 C, S' = C.
  const double kappa2 = omega * omega - 0.25 * c * c;
  double C = 1.0, S = t;
  if (kappa2 > 0.0) {
    const double kap = std::sqrt(kappa2);
    C = std::cos(kap * t);
    S = std::sin(kap * t) / kap;
  } else if (kappa2 < 0.0) {
    const double kap = std::sqrt(-kappa2);
    C = std::cosh(kap * t);
    S = std::sinh(kap * t) / kap;
  }
  const double Cp = -kappa2 * S;
  const cplx b = w0 + 0.5 * c * v0;
  const double decay = std::exp(-0.5 * c * t);
  const cplx inner = v0 * C + b * S;
  const cplx inner_p = v0 * Cp + b * C;
  return {decay * inner, decay * (inner_p - 0.5 * c * inner)};
}

DecaySeries run_decay(std::span<const double> damping, const InitialData& data, double T, double dt,
                      std::size_t sample_stride, unsigned jobs) {
  if (!(T > 0.0)) throw std::invalid_argument("run_decay: T must be positive");
  if (sample_stride == 0) throw std::invalid_argument("run_decay: sample_stride must be positive");
  WaveField state = WaveField::from(data);
  const StrangStepper stepper(state.grid, damping, dt);
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));

  DecaySeries out;
  out.t.push_back(0.0);
  out.energy.push_back(energy(state));
  for (std::size_t s = 1; s <= steps; ++s) {
    stepper.step(state, jobs);
    if (s % sample_stride == 0 || s == steps) {
      const double e = energy(state);
      if (e > out.energy.back() * (1.0 + 1e-12)) out.monotone = false;
      // t from the step count, not accumulated, so samples are exact multiples of dt.
      out.t.push_back(static_cast<double>(s) * dt);
      out.energy.push_back(e);
    }
  }
  return out;
}

DecaySeries run_decay(const DampingProfile& profile, const InitialData& data, double T, double dt,
                      std::size_t sample_stride, unsigned jobs) {
  const rvec W = sample_on_grid(profile, data.grid);
  return run_decay(W, data, T, dt, sample_stride, jobs);
}

DecayFit fit_decay(const DecaySeries& series, double t_min, double t_max, double alpha_ref,
                   double norm) {
  if (!(t_min > 0.0) || !(t_max > t_min)) throw std::invalid_argument("fit_decay: bad window");
  if (!(norm > 0.0)) throw std::invalid_argument("fit_decay: data norm must be positive");
  rvec ts, roots;
  DecayFit out;
  out.alpha_ref = alpha_ref;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    const double t = series.t[i];
    if (t < t_min || t > t_max) continue;
    if (!(series.energy[i] > 0.0)) throw std::domain_error("fit_decay: nonpositive energy in window");
    const double r = std::sqrt(series.energy[i]);
    ts.push_back(t);
    roots.push_back(r);
    const double functional = std::pow(t, alpha_ref) * r / norm;
    if (functional > out.sup_functional) {
      out.sup_functional = functional;
      out.t_at_sup = t;
    }
  }
  if (ts.size() < 2) throw std::invalid_argument("fit_decay: fewer than two samples in window");
  out.fit = fit_power_law(ts, roots);
  out.fit.exponent = 0.0 - out.fit.exponent;
  return out;
}

}  // namespace damplab
