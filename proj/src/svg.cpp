#include "spectral/svg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace spectral {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;
constexpr int kTicks = 5;

const char* series_color(int series) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  constexpr int k = static_cast<int>(sizeof(palette) / sizeof(palette[0]));
  int i = series % k;
  if (i < 0) i += k;
  return palette[i];
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

}  // namespace

SvgPlot::SvgPlot(double x_min, double x_max, double y_min, double y_max,
                 std::string title)
    : x_min_(x_min),
      x_max_(x_max),
      y_min_(y_min),
      y_max_(y_max),
      title_(std::move(title)) {
  if (!(x_max_ > x_min_) || !(y_max_ > y_min_) || !std::isfinite(x_min_) ||
      !std::isfinite(x_max_) || !std::isfinite(y_min_) || !std::isfinite(y_max_))
    throw std::invalid_argument("SvgPlot: bad axis range");
}

double SvgPlot::to_px_x(double x) const {
  return kMarginLeft +
         (x - x_min_) / (x_max_ - x_min_) * (kWidth - kMarginLeft - kMarginRight);
}

double SvgPlot::to_px_y(double y) const {
  return kHeight - kMarginBottom -
         (y - y_min_) / (y_max_ - y_min_) *
             (kHeight - kMarginTop - kMarginBottom);
}

void SvgPlot::add_polyline(const std::vector<std::array<double, 2>>& points,
                           int series) {
  if (points.size() < 2) return;
  std::string d;
  for (std::size_t i = 0; i < points.size(); ++i) {
    d += i == 0 ? "M" : " L";
    d += fmt(to_px_x(points[i][0]));
    d += ",";
    d += fmt(to_px_y(points[i][1]));
  }
  body_.push_back("<path d=\"" + d + "\" fill=\"none\" stroke=\"" +
                  series_color(series) + "\" stroke-width=\"1.5\"/>");
}

void SvgPlot::add_marker(double x, double y, int series) {
  body_.push_back("<circle cx=\"" + fmt(to_px_x(x)) + "\" cy=\"" +
                  fmt(to_px_y(y)) + "\" r=\"3\" fill=\"" +
                  series_color(series) + "\"/>");
}

void SvgPlot::add_series_label(const std::string& label, int series) {
  legend_.push_back("<rect x=\"" + fmt(kWidth - 190.0) + "\" y=\"" +
                    fmt(kMarginTop + 6.0 + 18.0 * legend_.size() / 2) +
                    "\" width=\"12\" height=\"12\" fill=\"" +
                    series_color(series) + "\"/>");
  legend_.push_back("<text x=\"" + fmt(kWidth - 172.0) + "\" y=\"" +
                    fmt(kMarginTop + 16.0 + 18.0 * (legend_.size() - 1) / 2) +
                    "\" font-family=\"monospace\" font-size=\"12\">" +
                    escape_xml(label) + "</text>");
}

std::string SvgPlot::render() const {
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
       "\" height=\"" + fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) +
       " " + fmt(kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(kWidth / 2) +
       "\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" "
       "font-size=\"16\">" +
       escape_xml(title_) + "</text>\n";

  // Axes.
  s += "<line x1=\"" + fmt(kMarginLeft) + "\" y1=\"" +
       fmt(kHeight - kMarginBottom) + "\" x2=\"" + fmt(kWidth - kMarginRight) +
       "\" y2=\"" + fmt(kHeight - kMarginBottom) +
       "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  s += "<line x1=\"" + fmt(kMarginLeft) + "\" y1=\"" + fmt(kMarginTop) +
       "\" x2=\"" + fmt(kMarginLeft) + "\" y2=\"" +
       fmt(kHeight - kMarginBottom) +
       "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  for (int k = 0; k <= kTicks; ++k) {
    double fx = x_min_ + (x_max_ - x_min_) * k / kTicks;
    double px = to_px_x(fx);
    s += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(kHeight - kMarginBottom) +
         "\" x2=\"" + fmt(px) + "\" y2=\"" +
         fmt(kHeight - kMarginBottom + 5.0) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt(px) + "\" y=\"" +
         fmt(kHeight - kMarginBottom + 20.0) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"11\">" +
         fmt(fx) + "</text>\n";

    double fy = y_min_ + (y_max_ - y_min_) * k / kTicks;
    double py = to_px_y(fy);
    s += "<line x1=\"" + fmt(kMarginLeft - 5.0) + "\" y1=\"" + fmt(py) +
         "\" x2=\"" + fmt(kMarginLeft) + "\" y2=\"" + fmt(py) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt(kMarginLeft - 8.0) + "\" y=\"" + fmt(py + 4.0) +
         "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" +
         fmt(fy) + "</text>\n";
  }

  for (const std::string& b : body_) {
    s += b;
    s += "\n";
  }
  for (const std::string& l : legend_) {
    s += l;
    s += "\n";
  }
  s += "</svg>\n";
  return s;
}

void SvgPlot::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("SvgPlot: cannot open " + path);
  out << render();
  if (!out) throw std::runtime_error("SvgPlot: write failed for " + path);
}

}  // namespace spectral
