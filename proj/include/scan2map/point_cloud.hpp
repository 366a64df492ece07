#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "scan2map/errors.hpp"
#include "scan2map/rng.hpp"
#include "scan2map/se3.hpp"

namespace scan2map {

/// Array of 3D points with optional per-point unit normals.
struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> normals;  // empty, or same length as points

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty(); }

  void reserve(std::size_t n) { points.reserve(n); }

  /// Cloud with every point mapped through the pose; normals rotate.
  PointCloud transformed(const Pose& p) const {
    PointCloud out;
    out.points.reserve(points.size());
    for (const auto& pt : points) out.points.push_back(p * pt);
    out.normals.reserve(normals.size());
    for (const auto& n : normals) out.normals.push_back(p.rotation * n);
    return out;
  }
};

struct NoiseSpec {
  double sigma = 0.1;  // meters
  std::uint64_t seed = 0;

  bool is_valid() const { return std::isfinite(sigma) && sigma >= 0.0; }
};

/// Exactly the points within `radius` of `center`, order-preserving.
/// Normals follow their points.
inline PointCloud radius_crop(const PointCloud& cloud, const Eigen::Vector3d& center,
                              double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("radius_crop: radius must be positive");
  }
  const double r2 = radius * radius;
  PointCloud out;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if ((cloud.points[i] - center).squaredNorm() <= r2) {
      out.points.push_back(cloud.points[i]);
      if (cloud.has_normals()) out.normals.push_back(cloud.normals[i]);
    }
  }
  return out;
}

/// Independent zero-mean Gaussian on every coordinate, sigma meters. Draw
/// order is point-major then x, y, z; each draw takes two rng outputs.
inline PointCloud add_noise(const PointCloud& cloud, const NoiseSpec& spec, Rng& rng) {
  if (!spec.is_valid()) {
    throw std::invalid_argument("add_noise: sigma must be finite and non-negative");
  }
  PointCloud out = cloud;
  for (auto& p : out.points) {
    p.x() += rng.next_gaussian(spec.sigma);
    p.y() += rng.next_gaussian(spec.sigma);
    p.z() += rng.next_gaussian(spec.sigma);
  }
  return out;
}

}  // namespace scan2map
