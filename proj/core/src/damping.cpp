#include "damplab/damping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace damplab {

std::string_view to_string(EnvelopeVariant variant) noexcept {
  switch (variant) {
    case EnvelopeVariant::ExactV: return "exact-V";
    case EnvelopeVariant::Scaled: return "scaled";
    case EnvelopeVariant::PlateauPerturbed: return "plateau-perturbed";
  }
  return "unknown";
}

DampingProfile::DampingProfile(double sigma, double beta, double c0, EnvelopeVariant v,
                               double param)
    : sigma_(sigma), beta_(beta), c0_(c0), variant_(v), param_(param) {
  if (!(sigma > 0.0 && sigma < kPi)) throw std::invalid_argument("sigma out of (0, pi)");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be >= 0");
  if (!(c0 >= 1.0) || !std::isfinite(c0)) throw std::invalid_argument("c0 must be >= 1");
  if (v == EnvelopeVariant::Scaled && !(param >= 1.0 / c0 && param <= c0)) {
    throw std::invalid_argument("scaled(c) requires 1/c0 <= c <= c0");
  }
  if (v == EnvelopeVariant::PlateauPerturbed && !(param >= 0.0 && std::isfinite(param))) {
    throw std::invalid_argument("plateau-perturbed(epsilon) requires epsilon >= 0");
  }
}

DampingProfile DampingProfile::exact(double sigma, double beta, double c0) {
  return {sigma, beta, c0, EnvelopeVariant::ExactV, 1.0};
}

DampingProfile DampingProfile::scaled(double sigma, double beta, double c0, double c) {
  return {sigma, beta, c0, EnvelopeVariant::Scaled, c};
}

DampingProfile DampingProfile::plateau(double sigma, double beta, double c0, double epsilon) {
  return {sigma, beta, c0, EnvelopeVariant::PlateauPerturbed, epsilon};
}

std::string DampingProfile::label() const {
  if (variant_ == EnvelopeVariant::ExactV) return "exact-V";
  std::ostringstream os;
  os << to_string(variant_) << '(' << param_ << ')';
  return os.str();
}

double eval_V(double x, const DampingProfile& profile) {
  const double ax = std::abs(x);
  if (!(ax <= kPi)) throw std::domain_error("eval_V: |x| > pi");
  // Closed interval [0, sigma] is undamped, also for beta = 0.
  if (ax <= profile.sigma()) return 0.0;
  if (profile.beta() == 0.0) return 1.0;
  return std::pow(ax - profile.sigma(), profile.beta());
}

double eval_W(double x, const DampingProfile& profile) {
  const double v = eval_V(x, profile);
  switch (profile.variant()) {
    case EnvelopeVariant::ExactV: return v;
    case EnvelopeVariant::Scaled: return profile.variant_param() * v;
    case EnvelopeVariant::PlateauPerturbed: {
      const double c0 = profile.c0();
      const double factor = std::clamp(1.0 + profile.variant_param() * std::cos(x), 1.0 / c0, c0);
      return factor * v;
    }
  }
  return v;
}

rvec sample_on_grid(const DampingProfile& profile, const CircleGrid& grid) {
  rvec w(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) w[j] = eval_W(grid.node(j), profile);
  return w;
}

EnvelopeCheck validate_envelope(std::span<const double> samples, const CircleGrid& grid,
                                const DampingProfile& profile) {
  require_length(samples.size(), grid.n(), "validate_envelope");
  constexpr double rel = 1e-14;
  const double c0 = profile.c0();
  EnvelopeCheck check;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const double v = eval_V(grid.node(j), profile);
    const double s = samples[j];
    double excess = 0.0;
    if (!std::isfinite(s)) {
      excess = std::numeric_limits<double>::infinity();
    } else if (v == 0.0) {
      if (s != 0.0) excess = std::numeric_limits<double>::infinity();
    } else {
      const double ratio = s / v;
      excess = std::max({0.0, ratio - c0 * (1.0 + rel), (1.0 - rel) / c0 - ratio});
    }
    if (excess > check.worst_excess) {
      check.worst_excess = excess;
      check.worst_index = j;
      check.ok = false;
    }
  }
  return check;
}

}  // namespace damplab
