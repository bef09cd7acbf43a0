#pragma once

#include <string>
#include <string_view>

#include "damplab/circle_grid.hpp"

namespace damplab {

enum class EnvelopeVariant { ExactV, Scaled, PlateauPerturbed };

std::string_view to_string(EnvelopeVariant variant) noexcept;

/// An x-invariant damping W on the circle obeying V/c0 <= W <= c0*V, where
/// V(x) = 0 for |x| <= sigma and (|x| - sigma)^beta for sigma < |x| <= pi.
///
/// Variants:
///   exact-V               W = V
///   scaled(c)             W = c*V with 1/c0 <= c <= c0
///   plateau-perturbed(e)  W = V * clamp(1 + e*cos x, 1/c0, c0)
///
/// The plateau perturbation wiggles W across the damped region while staying
/// inside the envelope, so results can be checked for insensitivity to the
/// exact shape of W.
class DampingProfile {
 public:
  static DampingProfile exact(double sigma, double beta, double c0 = 1.0);
  static DampingProfile scaled(double sigma, double beta, double c0, double c);
  static DampingProfile plateau(double sigma, double beta, double c0, double epsilon);

  double sigma() const noexcept { return sigma_; }
  double beta() const noexcept { return beta_; }
  double c0() const noexcept { return c0_; }
  EnvelopeVariant variant() const noexcept { return variant_; }
  /// c for scaled, epsilon for plateau-perturbed, 1 for exact-V.
  double variant_param() const noexcept { return param_; }

  /// "exact-V", "scaled(2)", "plateau-perturbed(0.25)"
  std::string label() const;

  bool operator==(const DampingProfile&) const = default;

 private:
  DampingProfile(double sigma, double beta, double c0, EnvelopeVariant v, double param);
  double sigma_;
  double beta_;
  double c0_;
  EnvelopeVariant variant_;
  double param_;
};

/// Envelope V(x). Throws std::domain_error for |x| > pi.
double eval_V(double x, const DampingProfile& profile);

/// Damping W(x) for the profile's variant. Throws std::domain_error for |x| > pi.
double eval_W(double x, const DampingProfile& profile);

rvec sample_on_grid(const DampingProfile& profile, const CircleGrid& grid);

struct EnvelopeCheck {
  bool ok = true;
  /// Largest distance of W_j/V_j outside [1/c0, c0]; infinite if W_j != 0 where V_j = 0.
  double worst_excess = 0.0;
  std::size_t worst_index = 0;
};

/// Checks samples against [V/c0, c0*V] node by node, allowing 1e-14 relative rounding.
EnvelopeCheck validate_envelope(std::span<const double> samples, const CircleGrid& grid,
                                const DampingProfile& profile);

}  // namespace damplab
