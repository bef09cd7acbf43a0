#include "damplab/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace damplab {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Axis {
  double lo, hi;  // log10 range
  double px0, px1;
  double map(double v) const { return px0 + (std::log10(v) - lo) / (hi - lo) * (px1 - px0); }
};

Axis make_axis(double vmin, double vmax, double px0, double px1) {
  double lo = std::log10(vmin), hi = std::log10(vmax);
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, px0, px1};
}

std::vector<double> ticks(const Axis& a) {
  std::vector<double> out;
  const int d0 = static_cast<int>(std::floor(a.lo));
  const int d1 = static_cast<int>(std::ceil(a.hi));
  const bool dense = (a.hi - a.lo) < 2.0;
  for (int d = d0; d <= d1; ++d) {
    for (double m : {1.0, 2.0, 5.0}) {
      if (m != 1.0 && !dense) continue;
      const double v = m * std::pow(10.0, d);
      const double l = std::log10(v);
      if (l >= a.lo && l <= a.hi) out.push_back(v);
    }
  }
  return out;
}

}  // namespace

std::string fraction_label(double value) {
  for (int den = 1; den <= 12; ++den) {
    const double numer = value * den;
    const double r = std::round(numer);
    if (std::abs(numer - r) < 1e-9 * den) {
      if (den == 1) return std::to_string(static_cast<long>(r));
      return std::to_string(static_cast<long>(r)) + "/" + std::to_string(den);
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", value);
  return buf;
}

std::string resolvent_slope_label(double beta) { return fraction_label(1.0 / (beta + 2.0)); }
std::string decay_rate_label(double beta) { return fraction_label((beta + 2.0) / (beta + 3.0)); }

std::string emit_plot(const PlotSpec& spec) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  std::size_t usable = 0;
  for (const auto& s : spec.series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("emit_plot: x and y lengths differ");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
      ++usable;
    }
  }
  if (usable == 0) throw std::invalid_argument("emit_plot: empty series");

  const Axis ax = make_axis(xmin, xmax, kLeft, kWidth - kRight);
  const Axis ay = make_axis(ymin, ymax, kHeight - kBottom, kTop);
  const double plot_x0 = kLeft, plot_x1 = kWidth - kRight;
  const double plot_y0 = kTop, plot_y1 = kHeight - kBottom;

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  o << "<defs><clipPath id=\"plotarea\"><rect x=\"" << num(plot_x0) << "\" y=\"" << num(plot_y0)
    << "\" width=\"" << num(plot_x1 - plot_x0) << "\" height=\"" << num(plot_y1 - plot_y0)
    << "\"/></clipPath></defs>\n";
  o << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(spec.title) << "</text>\n";

  // grid and tick labels
  o << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : ticks(ax)) {
    const double px = ax.map(t);
    o << "<line x1=\"" << num(px) << "\" y1=\"" << num(plot_y0) << "\" x2=\"" << num(px) << "\" y2=\""
      << num(plot_y1) << "\"/>\n";
  }
  for (double t : ticks(ay)) {
    const double py = ay.map(t);
    o << "<line x1=\"" << num(plot_x0) << "\" y1=\"" << num(py) << "\" x2=\"" << num(plot_x1) << "\" y2=\""
      << num(py) << "\"/>\n";
  }
  o << "</g>\n<g>\n";
  for (double t : ticks(ax)) {
    o << "<text x=\"" << num(ax.map(t)) << "\" y=\"" << num(plot_y1 + 16) << "\" text-anchor=\"middle\">"
      << tick_text(t) << "</text>\n";
  }
  for (double t : ticks(ay)) {
    o << "<text x=\"" << num(plot_x0 - 6) << "\" y=\"" << num(ay.map(t) + 4) << "\" text-anchor=\"end\">"
      << tick_text(t) << "</text>\n";
  }
  o << "</g>\n";
  o << "<rect x=\"" << num(plot_x0) << "\" y=\"" << num(plot_y0) << "\" width=\"" << num(plot_x1 - plot_x0)
    << "\" height=\"" << num(plot_y1 - plot_y0) << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << num((plot_x0 + plot_x1) / 2) << "\" y=\"" << num(kHeight - 18)
    << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << num((plot_y0 + plot_y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << num((plot_y0 + plot_y1) / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

  o << "<g clip-path=\"url(#plotarea)\">\n";
  std::size_t color = 0;
  double legend_y = plot_y0 + 10;
  std::ostringstream legend;
  for (const auto& s : spec.series) {
    const char* col = kPalette[color++ % std::size(kPalette)];
    o << "<g fill=\"" << col << "\">\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      o << "<circle cx=\"" << num(ax.map(s.x[i])) << "\" cy=\"" << num(ay.map(s.y[i])) << "\" r=\"3\"/>\n";
    }
    o << "</g>\n";
    if (s.fit) {
      const double a = s.fit->window_min, b = s.fit->window_max;
      auto line_y = [&](double x) { return s.fit->prefactor * std::pow(x, s.fit->exponent); };
      o << "<line x1=\"" << num(ax.map(a)) << "\" y1=\"" << num(ay.map(line_y(a))) << "\" x2=\"" << num(ax.map(b))
        << "\" y2=\"" << num(ay.map(line_y(b))) << "\" stroke=\"" << col << "\" stroke-width=\"1.5\"/>\n";
    }
    legend << "<circle cx=\"" << num(plot_x1 + 16) << "\" cy=\"" << num(legend_y - 4) << "\" r=\"3\" fill=\"" << col
           << "\"/>\n<text x=\"" << num(plot_x1 + 24) << "\" y=\"" << num(legend_y) << "\">" << escape(s.name);
    if (s.fit) {
      char buf[48];
      std::snprintf(buf, sizeof buf, " (slope %.3f)", s.fit->exponent);
      legend << buf;
    }
    legend << "</text>\n";
    legend_y += 18;
  }

  if (spec.reference_slope) {
    // Anchor the guide at the left end of the data, a little above the top point there.
    const double x0 = xmin, x1 = xmax;
    const double slope = *spec.reference_slope;
    double y0 = slope >= 0 ? ymin : ymax;
    const double y1 = y0 * std::pow(x1 / x0, slope);
    o << "<line x1=\"" << num(ax.map(x0)) << "\" y1=\"" << num(ay.map(y0)) << "\" x2=\"" << num(ax.map(x1))
      << "\" y2=\"" << num(ay.map(y1)) << "\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
  }
  o << "</g>\n";
  o << legend.str();
  if (spec.reference_slope) {
    o << "<line x1=\"" << num(plot_x1 + 8) << "\" y1=\"" << num(legend_y - 4) << "\" x2=\"" << num(plot_x1 + 22)
      << "\" y2=\"" << num(legend_y - 4) << "\" stroke=\"#555555\" stroke-dasharray=\"6 4\"/>\n";
    o << "<text x=\"" << num(plot_x1 + 26) << "\" y=\"" << num(legend_y) << "\">reference slope</text>\n";
    o << "<text class=\"reference-label\" x=\"" << num(plot_x1 + 26) << "\" y=\"" << num(legend_y + 16) << "\">"
      << escape(spec.reference_label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace damplab
