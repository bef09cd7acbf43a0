#include "damplab/multiplier_lab.hpp"

#include <algorithm>
#include <cmath>

namespace damplab {

namespace {

void require_q(double q) {
  if (!(q > 1.0)) throw std::invalid_argument("multiplier weights need q > 1");
}

double layer_width(double q, const DampingProfile& p) {
  return std::pow(q, -layer_exponent(p.beta()));
}

rvec abs2(std::span<const cplx> u) {
  rvec out(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = std::norm(u[j]);
  return out;
}

double weighted_integral(std::span<const double> weight, std::span<const double> values,
                         const CircleGrid& grid) {
  rvec prod(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) prod[j] = weight[j] * values[j];
  return integrate(prod, grid);
}

CheckReport make_report(std::string name, double lhs, double rhs) {
  CheckReport r;
  r.lemma = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.ratio = (lhs == 0.0 && rhs == 0.0) ? 0.0 : lhs / rhs;
  r.pass = std::isfinite(r.ratio);
  return r;
}

}  // namespace

double mu(double x, double q, const DampingProfile& profile) {
  require_q(q);
  const double ax = std::abs(x);
  const double s = profile.sigma();
  return (ax >= s && ax <= s + layer_width(q, profile)) ? std::pow(q, layer_exponent(profile.beta()))
                                                         : 1.0;
}

double chi(double x, double q, const DampingProfile& profile) {
  require_q(q);
  const double ax = std::abs(x);
  const double s = profile.sigma();
  if (ax <= s) return 0.0;
  const double ell = layer_width(q, profile);
  if (ax >= s + ell) return 1.0;
  return std::pow(q, layer_exponent(profile.beta())) * (ax - s);
}

WeightB weight_b(const CircleGrid& grid, double q, const DampingProfile& profile, double tau) {
  require_q(q);
  const double s = profile.sigma();
  const double ell = layer_width(q, profile);
  const double qd = std::pow(q, layer_exponent(profile.beta()));
  if (!(s + ell < tau && tau < kPi)) {
    throw std::invalid_argument("weight_b: need sigma + q^-delta < tau < pi (q too small for tau)");
  }
  WeightB out;
  out.M = (tau + 1.0 - ell) / (kPi - tau);

  auto slope = [&](double ax) {
    if (ax < s) return 1.0;
    if (ax < s + ell) return qd;
    if (ax < tau) return 1.0;
    return -out.M;
  };
  // G(t) = integral of b' over [0, t] for t in [0, pi].
  auto G = [&](double t) {
    double acc = std::min(t, s);
    if (t > s) acc += qd * (std::min(t, s + ell) - s);
    if (t > s + ell) acc += std::min(t, tau) - (s + ell);
    if (t > tau) acc -= out.M * (t - tau);
    return acc;
  };
  const double g_pi = G(kPi);
  out.periodicity_defect = 2.0 * g_pi;

  out.b.resize(grid.n());
  out.b_prime.resize(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const double x = grid.node(j);
    const double ax = std::abs(x);
    out.b_prime[j] = slope(ax);
    // b(x) = int_{-pi}^{x} b' = sign(x) G(|x|) + G(pi), since b' is even.
    out.b[j] = (x < 0.0 ? -G(ax) : G(ax)) + g_pi;
  }
  return out;
}

EtaSchedule eta_schedule(double beta, int min_layers) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("eta_schedule: beta >= 0");
  EtaSchedule out;
  int N = 0;
  while (beta > 6.0 * (std::pow(3.0, N + 1) - 1.0)) ++N;
  out.N = std::max(N, min_layers);
  const double delta = layer_exponent(beta);
  const double top = std::pow(3.0, out.N + 1);
  out.eta.resize(static_cast<std::size_t>(out.N) + 1);
  for (int k = 0; k <= out.N; ++k) {
    out.eta[static_cast<std::size_t>(k)] = delta * (top - std::pow(3.0, k)) / (top - 1.0);
  }
  return out;
}

double eta_recurrence_defect(const EtaSchedule& schedule) {
  const auto& e = schedule.eta;
  const int N = schedule.N;
  double worst = 0.0;
  for (int j = 0; j + 2 <= N; ++j) {
    const auto i = static_cast<std::size_t>(j);
    worst = std::max(worst, std::abs(3.0 * e[i] - 4.0 * e[i + 1] + e[i + 2]));
  }
  if (N >= 1) {
    const auto i = static_cast<std::size_t>(N);
    worst = std::max(worst, std::abs(3.0 * e[i - 1] - 4.0 * e[i]));
  }
  return worst;
}

double psi_bump(double x, const DampingProfile& profile) {
  const double a = profile.sigma() + 0.25 * (kPi - profile.sigma());
  const double ax = std::abs(x);
  if (ax <= a) return 0.0;
  const double s = (kPi - ax) / (kPi - a);
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double psi_bump_dxx(double x, const DampingProfile& profile) {
  const double a = profile.sigma() + 0.25 * (kPi - profile.sigma());
  const double ax = std::abs(x);
  if (ax <= a) return 0.0;
  const double s = (kPi - ax) / (kPi - a);
  if (s >= 1.0) return 0.0;
  const double one = 1.0 - s * s;
  const double psi = std::exp(1.0 - 1.0 / one);
  const double g1 = -2.0 * s / (one * one);
  const double g2 = -2.0 / (one * one) - 8.0 * s * s / (one * one * one);
  // d/dx = -(1/(pi - a)) d/ds on both sides since psi is even in s.
  return psi * (g1 * g1 + g2) / ((kPi - a) * (kPi - a));
}

double psi_damping_constant(const DampingProfile& profile, std::size_t samples) {
  const double a = profile.sigma() + 0.25 * (kPi - profile.sigma());
  double worst = 0.0;
  for (std::size_t i = 0; i <= samples; ++i) {
    const double x = a + (kPi - a) * static_cast<double>(i) / static_cast<double>(samples);
    const double num = std::abs(psi_bump_dxx(x, profile)) + std::abs(psi_bump(x, profile));
    if (num == 0.0) continue;
    worst = std::max(worst, num / eval_W(x, profile));
  }
  return worst;
}

MultiplierWeights build_weights(const CircleGrid& grid, double q, const DampingProfile& profile,
                                std::optional<double> tau, int min_layers) {
  MultiplierWeights w;
  w.q = q;
  w.delta = layer_exponent(profile.beta());
  w.tau = tau.value_or(0.5 * (profile.sigma() + kPi));
  const WeightB bw = weight_b(grid, q, profile, w.tau);
  w.b = bw.b;
  w.b_prime = bw.b_prime;
  w.M = bw.M;
  w.mu.resize(grid.n());
  w.chi.resize(grid.n());
  w.psi.resize(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const double x = grid.node(j);
    w.mu[j] = mu(x, q, profile);
    w.chi[j] = chi(x, q, profile);
    w.psi[j] = psi_bump(x, profile);
  }
  w.eta = eta_schedule(profile.beta(), min_layers);
  return w;
}

rvec energy_F(std::span<const cplx> u, double E, const CircleGrid& grid) {
  require_length(u.size(), grid.n(), "energy_F");
  const cvec du = diff_apply(u, grid.with_scheme(DiffScheme::Fourier));
  rvec F(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) F[j] = std::norm(du[j]) + E * std::norm(u[j]);
  return F;
}

CheckReport check_wu(const StationarySolve& s) {
  if (!(s.q > 0.0)) throw std::invalid_argument("check_wu: q must be positive");
  const rvec u2 = abs2(s.u);
  rvec fu(s.u.size());
  for (std::size_t j = 0; j < fu.size(); ++j) fu[j] = std::abs(s.f[j]) * std::abs(s.u[j]);
  CheckReport r = make_report("wu", weighted_integral(s.damping, u2, s.grid), integrate(fu, s.grid) / s.q);
  r.pass = r.slack >= -1e-12 * r.rhs;
  r.derivative = "none";
  return r;
}

CheckReport check_psi(const StationarySolve& s, std::span<const double> psi,
                      const DampingProfile& profile) {
  require_length(psi.size(), s.grid.n(), "check_psi");
  if (!(s.q > 0.0)) throw std::invalid_argument("check_psi: q must be positive");
  for (std::size_t j = 0; j < psi.size(); ++j) {
    if (std::abs(s.grid.node(j)) <= profile.sigma() && psi[j] != 0.0) {
      throw std::invalid_argument("check_psi: psi does not vanish on [-sigma, sigma]");
    }
  }
  const cvec du = diff_apply(s.u, s.grid.with_scheme(DiffScheme::Fourier));
  const rvec du2 = abs2(du);
  rvec fu(s.u.size());
  for (std::size_t j = 0; j < fu.size(); ++j) fu[j] = std::abs(s.f[j]) * std::abs(s.u[j]);
  const double lhs = weighted_integral(psi, du2, s.grid);
  const double rhs = (1.0 + std::max(0.0, s.E) / s.q) * integrate(fu, s.grid);
  return make_report("psi", lhs, rhs);
}

namespace {

double lemma_lhs(const StationarySolve& s, const MultiplierWeights& w, const cvec& du) {
  rvec dens(s.u.size());
  for (std::size_t j = 0; j < dens.size(); ++j) {
    dens[j] = w.mu[j] * (std::norm(du[j]) + s.E * std::norm(s.u[j]));
  }
  return integrate(dens, s.grid);
}

}  // namespace

CheckReport check_lemma_mu(const StationarySolve& s, const MultiplierWeights& w) {
  require_length(w.mu.size(), s.grid.n(), "check_lemma_mu weights");
  const cvec du = diff_apply(s.u, s.grid.with_scheme(DiffScheme::Fourier));
  rvec f2(s.u.size()), wuu(s.u.size());
  for (std::size_t j = 0; j < f2.size(); ++j) {
    f2[j] = std::norm(s.f[j]);
    wuu[j] = s.damping[j] * std::abs(s.u[j]) * std::abs(du[j]);
  }
  const double rhs = integrate(f2, s.grid) + s.q * integrate(wuu, s.grid);
  return make_report("lemma-mu", lemma_lhs(s, w, du), rhs);
}

CheckReport check_lemma_fuwfu(const StationarySolve& s, const MultiplierWeights& w) {
  require_length(w.mu.size(), s.grid.n(), "check_lemma_fuwfu weights");
  if (!(s.E >= 1.0)) throw std::invalid_argument("check_lemma_fuwfu: requires E >= 1");
  const cvec du = diff_apply(s.u, s.grid.with_scheme(DiffScheme::Fourier));
  rvec f2(s.u.size()), fu(s.u.size()), wchifu(s.u.size());
  for (std::size_t j = 0; j < f2.size(); ++j) {
    f2[j] = std::norm(s.f[j]);
    fu[j] = std::abs(s.f[j]) * std::abs(s.u[j]);
    wchifu[j] = s.damping[j] * w.chi[j] * fu[j];
  }
  const double rhs = (1.0 + std::pow(s.q, 2.0 * w.delta) / s.E) * integrate(f2, s.grid) +
                     std::sqrt(s.q) * std::sqrt(integrate(fu, s.grid)) *
                         std::sqrt(integrate(wchifu, s.grid));
  return make_report("lemma-fuwfu", lemma_lhs(s, w, du), rhs);
}

bool elem_premise(double a, double b, double c, double d, double e, double theta) {
  return a + b <= c * std::pow(b, 1.0 - theta) * std::pow(d, theta) + e;
}

bool elem_implication(double a, double b, double c, double d, double e, double theta,
                      double rel_slack) {
  if (a < 0.0 || b < 0.0 || c < 0.0 || d < 0.0 || e < 0.0) {
    throw std::domain_error("elem_implication: inputs must be nonnegative");
  }
  if (!(theta > 0.0 && theta <= 1.0)) throw std::domain_error("elem_implication: theta in (0, 1]");
  const double lhs = a + theta * b;
  const double rhs = theta * std::pow(c, 1.0 / theta) * d + e;
  return lhs <= rhs * (1.0 + rel_slack);
}

std::string_view to_string(SupportCase c) noexcept {
  switch (c) {
    case SupportCase::Undamped: return "undamped";
    case SupportCase::Layer: return "layer";
    case SupportCase::Annulus: return "annulus";
    case SupportCase::Bulk: return "bulk";
  }
  return "unknown";
}

rvec support_mask(SupportCase c, const CircleGrid& grid, double q, const DampingProfile& profile,
                  const EtaSchedule& eta) {
  const double s = profile.sigma();
  const double ell = layer_width(q, profile);
  const double bulk_start = s + std::pow(q, -eta.eta.back());
  rvec mask(grid.n(), 0.0);
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const double ax = std::abs(grid.node(j));
    bool in = false;
    switch (c) {
      case SupportCase::Undamped: in = ax <= s; break;
      case SupportCase::Layer: in = ax >= s && ax <= s + ell; break;
      case SupportCase::Annulus:
        for (std::size_t k = 0; k + 1 < eta.eta.size(); ++k) {
          in = in || (ax >= s + std::pow(q, -eta.eta[k]) && ax <= s + std::pow(q, -eta.eta[k + 1]));
        }
        break;
      case SupportCase::Bulk: in = ax >= bulk_start; break;
    }
    mask[j] = in ? 1.0 : 0.0;
  }
  return mask;
}

}  // namespace damplab
