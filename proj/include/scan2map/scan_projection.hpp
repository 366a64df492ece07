#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "scan2map/point_cloud.hpp"
#include "scan2map/se3.hpp"

namespace scan2map {

/// Projected-lidar sensor description. Channels are uniformly spaced in
/// elevation; azimuth is swept in fixed steps over the full circle.
struct BeamModel {
  int channels = 32;
  int azimuth_steps = 900;
  double elevation_min = -25.0 * std::numbers::pi / 180.0;  // radians
  double elevation_max = std::atan(0.5);                    // radians
  double max_range = 30.0;                                  // meters
  double max_height = 15.0;                                 // meters above sensor
  double angular_tolerance = 0.0;                           // radians

  bool is_valid() const {
    return channels >= 1 && azimuth_steps >= 1 && elevation_min < elevation_max &&
           max_range > 0.0 && angular_tolerance >= 0.0;
  }

  double channel_spacing() const {
    return channels > 1 ? (elevation_max - elevation_min) / (channels - 1)
                        : elevation_max - elevation_min;
  }

  double channel_elevation(int c) const {
    return channels > 1 ? elevation_min + c * channel_spacing()
                        : 0.5 * (elevation_min + elevation_max);
  }

  double azimuth_step() const { return 2.0 * std::numbers::pi / azimuth_steps; }
};

/// The emulated sensor: 32 channels over [-25 deg, atan(15/30)] so the top
/// beam reaches the 15 m ceiling exactly at the 30 m range limit, 0.4 deg
/// azimuth steps (900 per revolution), tolerance of half a channel spacing.
inline BeamModel default_beam_model() {
  BeamModel m;
  m.angular_tolerance = 0.5 * m.channel_spacing();
  return m;
}

/// Occlusion-aware projection of a map through the beam model, from the
/// sensor pose (sensor-to-map transform). Every map point is expressed in the
/// sensor frame and assigned to its nearest (azimuth, elevation) bin; within
/// a bin, only the minimum-range point survives (spherical depth buffer).
/// The surviving point must pass the range, height, and elevation gates and
/// lie within angular_tolerance of the bin center ray. Output points are map
/// points in the sensor frame, emitted channel-major then by azimuth bin.
inline PointCloud project_scan(const PointCloud& map, const Pose& sensor_pose,
                               const BeamModel& model) {
  if (map.empty()) {
    throw EmptyInputError("project_scan: empty map");
  }
  if (!model.is_valid()) {
    throw std::invalid_argument("project_scan: invalid beam model");
  }
  const Eigen::Matrix3d rot_inv = sensor_pose.rotation.transpose();
  const Eigen::Vector3d t = sensor_pose.translation;
  const double spacing = model.channel_spacing();
  const double az_step = model.azimuth_step();
  const std::size_t bin_count =
      static_cast<std::size_t>(model.channels) * static_cast<std::size_t>(model.azimuth_steps);

  struct BinBest {
    double range = std::numeric_limits<double>::infinity();
    std::size_t index = std::numeric_limits<std::size_t>::max();
    Eigen::Vector3d point = Eigen::Vector3d::Zero();
  };
  std::vector<BinBest> bins(bin_count);

  for (std::size_t i = 0; i < map.points.size(); ++i) {
    const Eigen::Vector3d p = rot_inv * (map.points[i] - t);
    const double range = p.norm();
    if (range < 1e-12) continue;
    const double elevation = std::asin(std::clamp(p.z() / range, -1.0, 1.0));
    int channel = 0;
    if (model.channels > 1) {
      channel = static_cast<int>(std::lround((elevation - model.elevation_min) / spacing));
      if (channel < 0 || channel >= model.channels) continue;
    } else if (std::abs(elevation - model.channel_elevation(0)) > 0.5 * spacing) {
      continue;
    }
    const double azimuth = std::atan2(p.y(), p.x());  // (-pi, pi]
    int az_bin = static_cast<int>(std::floor((azimuth + std::numbers::pi) / az_step));
    if (az_bin >= model.azimuth_steps) az_bin = 0;  // wrap the +pi boundary
    if (az_bin < 0) az_bin = 0;
    BinBest& best = bins[static_cast<std::size_t>(channel) * model.azimuth_steps + az_bin];
    if (range < best.range || (range == best.range && i < best.index)) {
      best.range = range;
      best.index = i;
      best.point = p;
    }
  }

  PointCloud scan;
  for (int c = 0; c < model.channels; ++c) {
    const double el_c = model.channel_elevation(c);
    const double cos_el = std::cos(el_c);
    const double sin_el = std::sin(el_c);
    for (int a = 0; a < model.azimuth_steps; ++a) {
      const BinBest& best = bins[static_cast<std::size_t>(c) * model.azimuth_steps + a];
      if (!std::isfinite(best.range)) continue;
      if (best.range > model.max_range) continue;
      if (best.point.z() > model.max_height) continue;
      const double elevation =
          std::asin(std::clamp(best.point.z() / best.range, -1.0, 1.0));
      if (elevation < model.elevation_min || elevation > model.elevation_max) continue;
      const double az_c = -std::numbers::pi + (a + 0.5) * az_step;
      const Eigen::Vector3d dir_bin(cos_el * std::cos(az_c), cos_el * std::sin(az_c), sin_el);
      const double cos_angle = std::clamp(best.point.dot(dir_bin) / best.range, -1.0, 1.0);
      if (std::acos(cos_angle) > model.angular_tolerance) continue;
      scan.points.push_back(best.point);
    }
  }
  return scan;
}

}  // namespace scan2map
