#pragma once

#include <optional>
#include <string>

#include "damplab/stationary.hpp"

namespace damplab {

/// Layer exponent delta = 1/(beta + 2).
inline double layer_exponent(double beta) { return 1.0 / (beta + 2.0); }

/// mu(x) = q^delta on |x| in [sigma, sigma + q^-delta], 1 elsewhere. Needs q > 1.
double mu(double x, double q, const DampingProfile& profile);

/// chi(x) = 0 on |x| <= sigma, q^delta (|x| - sigma) on the layer, 1 beyond.
double chi(double x, double q, const DampingProfile& profile);

struct WeightB {
  rvec b;
  rvec b_prime;
  double M = 0.0;
  /// b(pi) - b(-pi), from the closed-form antiderivative; zero up to roundoff.
  double periodicity_defect = 0.0;
};

/// Piecewise-linear multiplier with even derivative
///
///   b' = 1 on |x| < sigma, q^delta on the layer, 1 on (sigma + q^-delta, tau),
///        -M on (tau, pi),
///
/// M = (tau + 1 - q^-delta) / (pi - tau) so that the integral of b' vanishes,
/// and b(-pi) = 0. At a breakpoint node b' takes the value of the piece to the
/// right in |x|. Throws std::invalid_argument unless sigma + q^-delta < tau < pi.
WeightB weight_b(const CircleGrid& grid, double q, const DampingProfile& profile, double tau);

struct EtaSchedule {
  int N = 0;
  rvec eta;  // eta_0 = delta > eta_1 > ... > eta_N > 0
};

/// Smallest N >= min_layers with beta <= 6 (3^{N+1} - 1), and
/// eta_k = delta (3^{N+1} - 3^k) / (3^{N+1} - 1).
EtaSchedule eta_schedule(double beta, int min_layers = 0);

/// Largest absolute defect of 3 eta_j = 4 eta_{j+1} - eta_{j+2} (j <= N-2) and
/// 3 eta_{N-1} = 4 eta_N. Zero for N = 0.
double eta_recurrence_defect(const EtaSchedule& schedule);

/// Smooth bump exp(1 - 1/(1 - s^2)) in s = (pi - |x|) / (pi - a), a = sigma + (pi - sigma)/4;
/// zero for |x| <= a. Equals 1 at x = +-pi.
double psi_bump(double x, const DampingProfile& profile);
/// Second x-derivative of psi_bump.
double psi_bump_dxx(double x, const DampingProfile& profile);

/// C_psi = sup (|psi''| + |psi|) / W over the support of psi, sampled on a
/// uniform grid of the given resolution. Finite because W is bounded below there.
double psi_damping_constant(const DampingProfile& profile, std::size_t samples = 20000);

/// All weights of the multiplier arguments sampled for one (q, profile, grid).
struct MultiplierWeights {
  double q = 0.0;
  double delta = 0.0;
  double tau = 0.0;
  rvec mu;
  rvec chi;
  rvec b;
  rvec b_prime;
  double M = 0.0;
  rvec psi;
  EtaSchedule eta;
};

/// tau defaults to (sigma + pi)/2.
MultiplierWeights build_weights(const CircleGrid& grid, double q, const DampingProfile& profile,
                                std::optional<double> tau = std::nullopt, int min_layers = 0);

/// |u'|^2 + E |u|^2 at the nodes, with the Fourier derivative of u.
rvec energy_F(std::span<const cplx> u, double E, const CircleGrid& grid);

struct CheckReport {
  std::string lemma;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs; 0 when both vanish
  double slack = 0.0;  // rhs - lhs
  bool pass = true;
  std::string derivative = "fourier";
};

/// int W|u|^2 <= q^{-1} int |f u|; pass iff slack >= -1e-12 * rhs.
CheckReport check_wu(const StationarySolve& s);

/// int psi |u'|^2 against (1 + max(0, E)/q) int |f u|. Reports the ratio; pass
/// means the ratio is finite. Throws std::invalid_argument if psi is nonzero on
/// a node with |x| <= sigma.
CheckReport check_psi(const StationarySolve& s, std::span<const double> psi,
                      const DampingProfile& profile);

/// lhs = int mu |u'|^2 + E int mu |u|^2, rhs = int |f|^2 + q int W |u| |u'|.
CheckReport check_lemma_mu(const StationarySolve& s, const MultiplierWeights& w);

/// Same lhs; rhs = (1 + E^{-1} q^{2 delta}) int |f|^2
///               + q^{1/2} (int |f u|)^{1/2} (int |W chi f u|)^{1/2}.
/// Requires E >= 1.
CheckReport check_lemma_fuwfu(const StationarySolve& s, const MultiplierWeights& w);

/// Conclusion a + theta b <= theta c^{1/theta} d + e of the elementary
/// implication, tested with relative slack. Throws std::domain_error on
/// negative inputs or theta outside (0, 1].
bool elem_implication(double a, double b, double c, double d, double e, double theta,
                      double rel_slack = 1e-12);

/// Premise a + b <= c b^{1-theta} d^theta + e.
bool elem_premise(double a, double b, double c, double d, double e, double theta);

/// Support regions of f used in the four-case decomposition.
enum class SupportCase { Undamped = 1, Layer = 2, Annulus = 3, Bulk = 4 };

std::string_view to_string(SupportCase c) noexcept;

/// Indicator of case c at the nodes. Annulus covers the union of
/// [sigma + q^-eta_j, sigma + q^-eta_{j+1}] for j < N (empty when N = 0);
/// Bulk is |x| >= sigma + q^-eta_N.
rvec support_mask(SupportCase c, const CircleGrid& grid, double q, const DampingProfile& profile,
                  const EtaSchedule& eta);

}  // namespace damplab
