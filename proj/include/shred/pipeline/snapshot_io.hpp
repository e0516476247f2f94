#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "shred/simulate.hpp"

namespace shred::pipeline {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Header `# shred-snapshots v1; Nh=<int>; Nt=<int>; L=<float>; bc=<str>`
/// followed by Nh comma-separated rows of Nt values.
void save_snapshots(const std::filesystem::path& path, const SnapshotMatrix& snapshots);

/// The file carries no time values, so the loaded matrix gets the index grid
/// 0, 1, ..., Nt-1. Throws FormatError on a malformed header or body.
SnapshotMatrix load_snapshots(const std::filesystem::path& path);

/// Plain CSV: one header row of column names, then one line per matrix row.
void save_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                     const std::vector<std::string>& column_names);

}  // namespace shred::pipeline
