#include "shred/pipeline/snapshot_io.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "shred/errors.hpp"

namespace shred::pipeline {
namespace {

constexpr const char* kMagic = "# shred-snapshots v1";

double parse_double(std::string_view text, const std::string& what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw FormatError("cannot parse " + what + " '" + std::string(text) + "'");
  return v;
}

std::size_t parse_count(std::string_view text, const std::string& what) {
  std::size_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw FormatError("cannot parse " + what + " '" + std::string(text) + "'");
  return v;
}

std::string_view field_value(std::string_view part, std::string_view key) {
  while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
  if (part.substr(0, key.size()) != key || part.size() <= key.size() || part[key.size()] != '=')
    throw FormatError("snapshot header: expected field " + std::string(key));
  return part.substr(key.size() + 1);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void save_snapshots(const std::filesystem::path& path, const SnapshotMatrix& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << kMagic << "; Nh=" << s.rows() << "; Nt=" << s.cols() << "; L=" << format_double(s.grid.length())
      << "; bc=" << to_string(s.grid.boundary()) << "\n";
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (j) out << ',';
      out << format_double(s.values(i, j));
    }
    out << '\n';
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

SnapshotMatrix load_snapshots(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();

  std::vector<std::string_view> parts;
  std::string_view rest(header);
  for (auto pos = rest.find(';'); pos != std::string_view::npos; pos = rest.find(';')) {
    parts.push_back(rest.substr(0, pos));
    rest.remove_prefix(pos + 1);
  }
  parts.push_back(rest);
  if (parts.size() != 5 || parts[0] != kMagic) throw FormatError("not a shred snapshot file: " + path.string());
  const std::size_t nh = parse_count(field_value(parts[1], "Nh"), "Nh");
  const std::size_t nt = parse_count(field_value(parts[2], "Nt"), "Nt");
  const double length = parse_double(field_value(parts[3], "L"), "L");
  BoundaryKind bc;
  try {
    bc = boundary_from_string(std::string(field_value(parts[4], "bc")));
  } catch (const ValidationError& e) {
    throw FormatError(std::string("snapshot header: ") + e.what());
  }
  if (nh == 0 || nt == 0) throw FormatError("snapshot header declares an empty matrix");

  Eigen::MatrixXd values(static_cast<Eigen::Index>(nh), static_cast<Eigen::Index>(nt));
  std::string line;
  for (std::size_t i = 0; i < nh; ++i) {
    if (!std::getline(in, line)) throw FormatError("snapshot file ends after " + std::to_string(i) + " rows");
    std::string_view row(line);
    for (std::size_t j = 0; j < nt; ++j) {
      const auto pos = row.find(',');
      if ((pos == std::string_view::npos) != (j + 1 == nt))
        throw FormatError("row " + std::to_string(i) + " does not have " + std::to_string(nt) + " values");
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_double(row.substr(0, pos), "value");
      if (pos != std::string_view::npos) row.remove_prefix(pos + 1);
    }
  }
  while (std::getline(in, line))
    if (!line.empty() && line != "\r") throw FormatError("snapshot file has more than " + std::to_string(nh) + " rows");

  std::vector<double> t(nt);
  std::iota(t.begin(), t.end(), 0.0);
  try {
    return SnapshotMatrix(std::move(values), SpatialGrid(length, nh, bc), TimeGrid::from_list(std::move(t)));
  } catch (const ValidationError& e) {
    throw FormatError(std::string("snapshot file inconsistent: ") + e.what());
  }
}

void save_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                     const std::vector<std::string>& column_names) {
  if (static_cast<Eigen::Index>(column_names.size()) != values.cols())
    throw DimensionMismatch("column names do not match the matrix");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  for (std::size_t j = 0; j < column_names.size(); ++j) out << (j ? "," : "") << column_names[j];
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
}

}  // namespace shred::pipeline
