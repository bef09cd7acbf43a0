#pragma once

#include <string>
#include <utility>
#include <vector>

#include "damplab/circle_grid.hpp"
#include "damplab/damping.hpp"
#include "damplab/power_fit.hpp"

namespace damplab {

/// One y-Fourier mode v(x, y) = v_k(x) e^{i k y} with w_k = d/dt v_k.
struct ModeField {
  long k = 0;
  cvec v;
  cvec w;
};

/// Initial data (v0, v1) as a list of y-modes; modes[i].w holds v1.
struct InitialData {
  std::string family = "custom";
  CircleGrid grid{8};
  std::vector<ModeField> modes;
};

/// Solution of v_tt + W v_t - Delta v = 0 on the torus, stored mode by mode.
struct WaveField {
  CircleGrid grid{8};
  std::vector<ModeField> modes;
  double t = 0.0;

  static WaveField from(const InitialData& data);
};

/// v0 = exp(-x^2 / (2 width^2)) e^{iky}, v1 = i sqrt(1 + k^2) v0.
InitialData gaussian_strip(const CircleGrid& grid, long k, double width);
/// v0 = v0_amp e^{i(mx + ky)}, v1 = w0_amp e^{i(mx + ky)}.
InitialData plane_wave(const CircleGrid& grid, long m, long k, cplx v0_amp = 1.0, cplx w0_amp = 0.0);

/// Strang step with cached factors for a fixed (W, dt, grid).
///
/// Half step of damping w <- exp(-W dt/2) w, exact rotation of every x-Fourier
/// mode m with omega = sqrt(m^2 + k^2) (omega = 0: v += w dt), half step of
/// damping. Each substep is nonexpansive in the energy.
class StrangStepper {
 public:
  StrangStepper(const CircleGrid& grid, std::span<const double> damping, double dt);

  double dt() const noexcept { return dt_; }
  void advance(ModeField& mode) const;
  /// Advances every mode by one step; modes are split across `jobs` threads.
  void step(WaveField& state, unsigned jobs = 1) const;

 private:
  CircleGrid grid_;
  double dt_;
  rvec half_damp_;
  rvec m2_;
};

/// One Strang step of size dt (dt > 0).
void step(WaveField& state, double dt, std::span<const double> damping, unsigned jobs = 1);

/// 2 pi sum_k int |w_k|^2 + |v_k'|^2 + k^2 |v_k|^2 dx, evaluated in Fourier
/// space with the Nyquist mode weighted by (n/2)^2 (the same symbol the
/// rotation substep uses, so W = 0 conserves it to roundoff).
double energy(const WaveField& state);

/// (sum_{m,k} (1 + m^2 + k^2)^s |c_{m,k}|^2)^{1/2}, coefficients normalized so
/// that the constant 1 has norm 2 pi. `which` selects v (0) or w (1).
double sobolev_norm(const CircleGrid& grid, const std::vector<ModeField>& modes, int s, int which = 0);
double sobolev_norm(const InitialData& data, int s, int which = 0);

/// ||v0||_{H^2} + ||v1||_{H^1}.
double data_norm(const InitialData& data);
/// ||v0||_{H^2} + ||d_t v1||_{H^1} with d_t v1 = Delta v0 - W v1 at t = 0.
double literal_data_norm(const InitialData& data, std::span<const double> damping);

/// Closed-form solution of v'' + c v' + omega^2 v = 0 with v(0) = v0, v'(0) = w0.
/// Returns (v(t), v'(t)). Covers under-, over- and critically damped cases.
std::pair<cplx, cplx> oracle_constant_damping(double c, double omega, cplx v0, cplx w0, double t);

struct DecaySeries {
  std::vector<double> t;
  std::vector<double> energy;
  /// E(t_{i+1}) <= E(t_i) (1 + 1e-12) held at every sample.
  bool monotone = true;
};

/// Evolves the data to time T with step dt, recording the energy at t = 0 and
/// every `sample_stride` steps. The step count is round(T / dt).
DecaySeries run_decay(const DampingProfile& profile, const InitialData& data, double T, double dt,
                      std::size_t sample_stride, unsigned jobs = 1);
DecaySeries run_decay(std::span<const double> damping, const InitialData& data, double T, double dt,
                      std::size_t sample_stride, unsigned jobs = 1);

struct DecayFit {
  /// exponent is alpha = -(slope of log E^{1/2} against log t).
  FitResult fit;
  double alpha_ref = 0.0;
  /// sup over the window of t^alpha_ref E(t)^{1/2} / data_norm.
  double sup_functional = 0.0;
  double t_at_sup = 0.0;
};

/// Fits over samples with t in [t_min, t_max]. Throws std::domain_error on a
/// nonpositive energy inside the window, std::invalid_argument if fewer than
/// two samples fall inside.
DecayFit fit_decay(const DecaySeries& series, double t_min, double t_max, double alpha_ref,
                   double data_norm);

/// Default window [T/50, T/2].
inline std::pair<double, double> default_decay_window(double T) { return {T / 50.0, T / 2.0}; }

/// Reference rate (beta + 2)/(beta + 3).
inline double decay_rate(double beta) { return (beta + 2.0) / (beta + 3.0); }

}  // namespace damplab
