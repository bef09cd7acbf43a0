#include "damplab/power_fit.hpp"

#include <algorithm>
#include <cmath>

namespace damplab {

FitResult fit_power_law(std::span<const double> x, std::span<const double> y) {
  require_length(y.size(), x.size(), "fit_power_law");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("fit_power_law: need at least 2 points");
  rvec lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw std::invalid_argument("fit_power_law: x and y must be positive and finite");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = pairwise_sum<double>(lx) / static_cast<double>(n);
  const double my = pairwise_sum<double>(ly) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 1e-300)) throw std::invalid_argument("fit_power_law: degenerate input (all x equal)");

  FitResult fit;
  fit.exponent = sxy / sxx;
  fit.log_prefactor = my - fit.exponent * mx;
  fit.prefactor = std::exp(fit.log_prefactor);
  fit.points = n;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  fit.window_min = *lo;
  fit.window_max = *hi;
  for (std::size_t i = 0; i < n; ++i) {
    fit.max_residual =
        std::max(fit.max_residual, std::abs(ly[i] - (fit.log_prefactor + fit.exponent * lx[i])));
  }
  return fit;
}

}  // namespace damplab
