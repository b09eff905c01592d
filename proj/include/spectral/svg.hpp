#pragma once

#include <array>
#include <string>
#include <vector>

namespace spectral {

// Minimal deterministic SVG line plot: fixed viewport, axes with ticks and
// labels, one stroked path per polyline. No timestamps or environment-
// dependent content, so output bytes depend only on the calls made.
class SvgPlot {
 public:
  SvgPlot(double x_min, double x_max, double y_min, double y_max,
          std::string title);

  // Polylines grouped by series; series index selects the stroke color.
  void add_polyline(const std::vector<std::array<double, 2>>& points,
                    int series);
  void add_marker(double x, double y, int series);
  void add_series_label(const std::string& label, int series);
  std::string render() const;
  void write(const std::string& path) const;

 private:
  double to_px_x(double x) const;
  double to_px_y(double y) const;
  double x_min_, x_max_, y_min_, y_max_;
  std::string title_;
  std::vector<std::string> body_;
  std::vector<std::string> legend_;
};

}  // namespace spectral
