#pragma once

#include "damplab/types.hpp"

namespace damplab {

/// Least-squares power law y ~ prefactor * x^exponent fitted in log-log space.
struct FitResult {
  double exponent = 0.0;
  double prefactor = 0.0;
  double log_prefactor = 0.0;
  /// Range of x actually used by the fit.
  double window_min = 0.0;
  double window_max = 0.0;
  /// Largest |log y_i - (log_prefactor + exponent * log x_i)|.
  double max_residual = 0.0;
  std::size_t points = 0;
};

/// Fits log y = a + s log x by ordinary least squares.
/// Requires >= 2 points, positive finite x and y, and x not all equal.
FitResult fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace damplab
