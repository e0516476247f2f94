#include "shred/pipeline/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include "shred/errors.hpp"

namespace shred::pipeline {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 50;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

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

void widen(double& lo, double& hi) {
  if (hi > lo) return;
  const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
  lo -= pad;
  hi += pad;
}

std::ofstream open_svg(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out;
}

void axes(std::ofstream& out, const std::string& title, double x0, double x1, double y0, double y1,
          const std::string& x_label, const std::string& y_label) {
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";
  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double px = kLeft + f * pw;
    const double py = kTop + ph - f * ph;
    out << "<line x1=\"" << num(px) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(px) << "\" y2=\""
        << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(px) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
        << tick(x0 + f * (x1 - x0)) << "</text>\n";
    out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(kLeft) << "\" y2=\""
        << num(py) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
        << tick(y0 + f * (y1 - y0)) << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 10) << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num(kTop + ph / 2) << ")\">" << escape(y_label) << "</text>\n";
}

std::string color_hex(double r, double g, double b) {
  char buf[8];
  auto c = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c(r), c(g), c(b));
  return buf;
}

}  // namespace

bool write_line_plot(const std::filesystem::path& path, const std::string& title,
                     const std::vector<LineSeries>& series, const std::string& x_label, const std::string& y_label) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  bool any = false;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw DimensionMismatch("series '" + s.label + "' has mismatched x and y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      any = true;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!any) {
    std::cerr << "warning: no data for plot " << path.string() << ", skipped\n";
    return false;
  }
  widen(x0, x1);
  widen(y0, y1);

  auto out = open_svg(path);
  axes(out, title, x0, x1, y0, y1, x_label, y_label);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      const double px = kLeft + (s.x[i] - x0) / (x1 - x0) * pw;
      const double py = kTop + ph - (s.y[i] - y0) / (y1 - y0) * ph;
      points += (points.empty() ? "" : " ") + num(px) + "," + num(py);
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,3\"" : "") << " points=\"" << points << "\"/>\n";
    const double ly = kTop + 12 + 18.0 * static_cast<double>(k);
    out << "<line x1=\"" << num(kWidth - kRight + 10) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(kWidth - kRight + 30) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,3\"" : "") << "/>\n";
    out << "<text x=\"" << num(kWidth - kRight + 35) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
        << "</text>\n";
  }
  out << "</svg>\n";
  return true;
}

bool write_heatmap(const std::filesystem::path& path, const std::string& title, const Eigen::MatrixXd& field,
                   double x_min, double x_max, double t_min, double t_max) {
  if (field.size() == 0) {
    std::cerr << "warning: no data for plot " << path.string() << ", skipped\n";
    return false;
  }
  double lo = field.minCoeff(), hi = field.maxCoeff();
  const bool diverging = lo < 0.0 && hi > 0.0;
  if (diverging) {
    hi = std::max(-lo, hi);
    lo = -hi;
  }
  widen(lo, hi);
  widen(x_min, x_max);
  widen(t_min, t_max);

  auto out = open_svg(path);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const double cw = pw / static_cast<double>(field.cols());
  const double chh = ph / static_cast<double>(field.rows());
  auto color = [&](double v) {
    const double f = (v - lo) / (hi - lo);
    if (diverging) {
      return f < 0.5 ? color_hex(2 * f, 2 * f, 1.0) : color_hex(1.0, 2 * (1 - f), 2 * (1 - f));
    }
    return color_hex(f, 0.2 + 0.6 * f, 1.0 - f);
  };
  out << "<g shape-rendering=\"crispEdges\">\n";
  for (Eigen::Index i = 0; i < field.rows(); ++i)
    for (Eigen::Index j = 0; j < field.cols(); ++j)
      out << "<rect x=\"" << num(kLeft + static_cast<double>(j) * cw) << "\" y=\""
          << num(kTop + ph - static_cast<double>(i + 1) * chh) << "\" width=\"" << num(cw + 0.05) << "\" height=\""
          << num(chh + 0.05) << "\" fill=\"" << color(field(i, j)) << "\"/>\n";
  out << "</g>\n";
  // Time runs along the horizontal axis, space along the vertical one.
  axes(out, title, t_min, t_max, x_min, x_max, "t", "x");

  const double bx = kWidth - kRight + 20;
  for (int k = 0; k < 50; ++k) {
    const double f = k / 49.0;
    out << "<rect x=\"" << num(bx) << "\" y=\"" << num(kTop + ph - (k + 1) * ph / 50.0) << "\" width=\"16\" height=\""
        << num(ph / 50.0 + 0.05) << "\" fill=\"" << color(lo + f * (hi - lo)) << "\"/>\n";
  }
  out << "<text x=\"" << num(bx + 22) << "\" y=\"" << num(kTop + 10) << "\">" << tick(hi) << "</text>\n";
  out << "<text x=\"" << num(bx + 22) << "\" y=\"" << num(kTop + ph) << "\">" << tick(lo) << "</text>\n";
  out << "</svg>\n";
  return true;
}

}  // namespace shred::pipeline
