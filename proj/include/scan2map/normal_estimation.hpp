#pragma once

#include <Eigen/Dense>
#include <vector>

#include "scan2map/kd_tree.hpp"
#include "scan2map/point_cloud.hpp"

namespace scan2map {

/// Per-point normal from the covariance of the k nearest neighbors (the query
/// point itself excluded): smallest-eigenvalue eigenvector, flipped so
/// dot(normal, viewpoint - point) >= 0, unit length.
inline PointCloud estimate_normals(const PointCloud& cloud, std::size_t k,
                                   const Eigen::Vector3d& viewpoint) {
  if (k < 3) {
    throw std::invalid_argument("estimate_normals: k must be at least 3");
  }
  if (cloud.size() < k + 1) {
    throw InsufficientPointsError("estimate_normals: cloud needs at least k+1 points");
  }
  const SpatialIndex index(cloud);
  PointCloud out;
  out.points = cloud.points;
  out.normals.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto neighbors = index.knn(cloud.points[i], k + 1);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    std::size_t used = 0;
    for (const auto& nb : neighbors) {
      if (nb.index == i) continue;
      mean += cloud.points[nb.index];
      if (++used == k) break;
    }
    mean /= static_cast<double>(used);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    used = 0;
    for (const auto& nb : neighbors) {
      if (nb.index == i) continue;
      const Eigen::Vector3d d = cloud.points[nb.index] - mean;
      cov += d * d.transpose();
      if (++used == k) break;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Eigen::Vector3d n = eig.eigenvectors().col(0);
    if (n.dot(viewpoint - cloud.points[i]) < 0.0) n = -n;
    out.normals[i] = n.normalized();
  }
  return out;
}

}  // namespace scan2map
