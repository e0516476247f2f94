#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shred::pipeline {

struct LineSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// SVG 1.1 line chart; the axes span the union of all series. Returns false
/// and writes nothing (warning on stderr) when every series is empty.
bool write_line_plot(const std::filesystem::path& path, const std::string& title,
                     const std::vector<LineSeries>& series, const std::string& x_label = "t",
                     const std::string& y_label = "u");

/// SVG 1.1 space-time heat map of `field` (rows = space, columns = time)
/// with a blue-white-red diverging palette symmetric about zero when the
/// data change sign, otherwise a sequential palette over [min, max].
bool write_heatmap(const std::filesystem::path& path, const std::string& title, const Eigen::MatrixXd& field,
                   double x_min, double x_max, double t_min, double t_max);

}  // namespace shred::pipeline
