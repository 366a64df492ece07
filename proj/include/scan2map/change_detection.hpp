#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scan2map/kd_tree.hpp"
#include "scan2map/point_cloud.hpp"
#include "scan2map/se3.hpp"
#include "scan2map/stats.hpp"
#include "scan2map/trajectory_io.hpp"

namespace scan2map {

/// Marks exactly the session points whose nearest reference neighbor is
/// farther than the threshold. Clouds must be pre-aligned.
inline std::vector<std::uint8_t> detect_changes(const PointCloud& session,
                                                const SpatialIndex& reference_index,
                                                double threshold) {
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("detect_changes: threshold must be positive");
  }
  if (reference_index.empty()) {
    throw EmptyInputError("detect_changes: empty reference");
  }
  std::vector<std::uint8_t> mask(session.size(), 0);
  for (std::size_t i = 0; i < session.size(); ++i) {
    mask[i] = reference_index.nearest(session.points[i]).distance > threshold ? 1 : 0;
  }
  return mask;
}

/// Percentage of change within the sphere around the pose: 100 times the
/// count of in-sphere session points farther than the threshold from the
/// full reference, over the count of in-sphere reference points.
inline double change_percent_at_pose(const PointCloud& session, const PointCloud& reference,
                                     const SpatialIndex& reference_index, const Pose& pose,
                                     double radius, double threshold) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("change_percent_at_pose: radius must be positive");
  }
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("change_percent_at_pose: threshold must be positive");
  }
  if (reference_index.empty()) {
    throw EmptyInputError("change_percent_at_pose: empty reference");
  }
  const Eigen::Vector3d center = pose.translation;
  const double r2 = radius * radius;
  std::size_t ref_in_sphere = 0;
  for (const auto& p : reference.points) {
    if ((p - center).squaredNorm() <= r2) ++ref_in_sphere;
  }
  if (ref_in_sphere == 0) {
    throw UndefinedRatioError("change_percent_at_pose: no reference points in sphere");
  }
  std::size_t changed = 0;
  for (const auto& p : session.points) {
    if ((p - center).squaredNorm() > r2) continue;
    if (reference_index.nearest(p).distance > threshold) ++changed;
  }
  return 100.0 * static_cast<double>(changed) / static_cast<double>(ref_in_sphere);
}

inline SummaryStats summarize_changes(const std::vector<double>& per_pose_percents) {
  return summarize(per_pose_percents);
}

struct ChangePoseRow {
  std::string pose_id;
  double change_percent = 0.0;
  std::size_t new_points = 0;
  std::size_t ref_points = 0;
};

struct ChangeReport {
  std::vector<ChangePoseRow> per_pose;
  SummaryStats summary;
};

/// Per-pose change percentages over a trajectory, plus summary statistics.
inline ChangeReport compute_change_report(const PointCloud& session, const PointCloud& reference,
                                          const SpatialIndex& reference_index,
                                          const std::vector<TrajectoryEntry>& trajectory,
                                          double radius, double threshold) {
  if (trajectory.empty()) {
    throw EmptyInputError("compute_change_report: empty trajectory");
  }
  const auto mask = detect_changes(session, reference_index, threshold);
  ChangeReport report;
  std::vector<double> percents;
  for (const auto& entry : trajectory) {
    const Eigen::Vector3d center = entry.pose.translation;
    const double r2 = radius * radius;
    std::size_t ref_in_sphere = 0;
    for (const auto& p : reference.points) {
      if ((p - center).squaredNorm() <= r2) ++ref_in_sphere;
    }
    if (ref_in_sphere == 0) {
      throw UndefinedRatioError("compute_change_report: no reference points in sphere at pose " +
                                entry.pose_id);
    }
    std::size_t changed = 0;
    for (std::size_t i = 0; i < session.size(); ++i) {
      if (!mask[i]) continue;
      if ((session.points[i] - center).squaredNorm() <= r2) ++changed;
    }
    const double percent =
        100.0 * static_cast<double>(changed) / static_cast<double>(ref_in_sphere);
    report.per_pose.push_back({entry.pose_id, percent, changed, ref_in_sphere});
    percents.push_back(percent);
  }
  report.summary = summarize_changes(percents);
  return report;
}

/// CSV rows pose_id,change_percent,new_points,ref_points followed by a
/// summary footer row carrying median, IQR, max in the numeric columns.
inline void write_change_csv(std::ostream& out, const ChangeReport& report) {
  out << "pose_id,change_percent,new_points,ref_points\n";
  for (const auto& row : report.per_pose) {
    out << row.pose_id << ',' << detail::format_double(row.change_percent) << ','
        << row.new_points << ',' << row.ref_points << '\n';
  }
  out << "summary," << detail::format_double(report.summary.median) << ','
      << detail::format_double(report.summary.iqr) << ','
      << detail::format_double(report.summary.max) << '\n';
}

inline nlohmann::json change_report_to_json(const ChangeReport& report) {
  nlohmann::json j;
  j["per_pose"] = nlohmann::json::array();
  for (const auto& row : report.per_pose) {
    j["per_pose"].push_back({{"pose_id", row.pose_id},
                             {"change_percent", row.change_percent},
                             {"new_points", row.new_points},
                             {"ref_points", row.ref_points}});
  }
  j["summary"] = {{"median", report.summary.median},
                  {"iqr", report.summary.iqr},
                  {"max", report.summary.max}};
  return j;
}

}  // namespace scan2map
