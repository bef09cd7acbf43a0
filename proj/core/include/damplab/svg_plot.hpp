#pragma once

#include <optional>
#include <string>
#include <vector>

#include "damplab/power_fit.hpp"

namespace damplab {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::optional<FitResult> fit;  // drawn over [window_min, window_max]
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  /// Guide line y ~ x^reference_slope, labeled with reference_label.
  std::optional<double> reference_slope;
  std::string reference_label;
};

/// Log-log SVG document. Nonpositive points are skipped. Throws
/// std::invalid_argument when no series holds a plottable point.
std::string emit_plot(const PlotSpec& spec);

/// "1/2", "2/3", "3/4" for rational slopes with small denominators, else %.4g.
std::string fraction_label(double value);

/// Reference labels: 1/(beta+2) for resolvent growth, (beta+2)/(beta+3) for decay.
std::string resolvent_slope_label(double beta);
std::string decay_rate_label(double beta);

}  // namespace damplab
