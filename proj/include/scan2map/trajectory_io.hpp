#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scan2map/errors.hpp"
#include "scan2map/se3.hpp"

namespace scan2map {

struct TrajectoryEntry {
  std::string pose_id;
  Pose pose;
};

inline constexpr const char* kTrajectoryHeader = "pose_id,tx,ty,tz,qx,qy,qz,qw";

namespace detail {

/// Shortest round-trip decimal form of a double, locale-independent.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& token, const std::string& context) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ParseError("bad number '" + token + "' in " + context);
  }
  return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace detail

/// Reads a trajectory CSV with header pose_id,tx,ty,tz,qx,qy,qz,qw; meters
/// and unit quaternion per row.
inline std::vector<TrajectoryEntry> read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("read_trajectory_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("read_trajectory_csv: empty file " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader) {
    throw ParseError("read_trajectory_csv: bad header in " + path);
  }
  std::vector<TrajectoryEntry> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != 8) {
      throw ParseError("read_trajectory_csv: expected 8 fields in " + path);
    }
    std::array<double, 7> row;
    for (int i = 0; i < 7; ++i) {
      row[i] = detail::parse_double(fields[i + 1], path);
    }
    out.push_back({fields[0], pose_from_quaternion_row(row)});
  }
  return out;
}

inline void write_trajectory_csv(const std::string& path,
                                 const std::vector<TrajectoryEntry>& entries) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("write_trajectory_csv: cannot open " + path);
  }
  out << kTrajectoryHeader << '\n';
  for (const auto& e : entries) {
    const auto row = pose_to_quaternion_row(e.pose);
    out << e.pose_id;
    for (const double v : row) out << ',' << detail::format_double(v);
    out << '\n';
  }
  if (!out) {
    throw IoError("write_trajectory_csv: write failed for " + path);
  }
}

}  // namespace scan2map
