#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "scan2map/point_cloud.hpp"

namespace scan2map {

namespace detail {

struct VoxelKey {
  std::int64_t x, y, z;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::uint64_t h = splitmix64_mix(static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ULL);
    h = splitmix64_mix(h ^ (static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4FULL));
    h = splitmix64_mix(h ^ (static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ULL));
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// Grid cell of a point under an origin-anchored voxel grid with half-open
/// cells [i*v, (i+1)*v); boundary points land in the higher cell.
inline detail::VoxelKey voxel_key(const Eigen::Vector3d& p, double voxel) {
  return {static_cast<std::int64_t>(std::floor(p.x() / voxel)),
          static_cast<std::int64_t>(std::floor(p.y() / voxel)),
          static_cast<std::int64_t>(std::floor(p.z() / voxel))};
}

/// One output point per occupied voxel, placed at the centroid of the cell's
/// points. Output cells appear in order of first occupancy, so the result is
/// deterministic. Normals are dropped; re-estimate after downsampling.
inline PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0)) {
    throw std::invalid_argument("voxel_downsample: voxel size must be positive");
  }
  struct Cell {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    std::size_t count = 0;
  };
  std::vector<Cell> cells;
  std::unordered_map<detail::VoxelKey, std::size_t, detail::VoxelKeyHash> lookup;
  lookup.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    const auto key = voxel_key(p, voxel);
    auto [it, inserted] = lookup.try_emplace(key, cells.size());
    if (inserted) cells.emplace_back();
    Cell& c = cells[it->second];
    c.sum += p;
    ++c.count;
  }
  PointCloud out;
  out.points.reserve(cells.size());
  for (const auto& c : cells) {
    out.points.push_back(c.sum / static_cast<double>(c.count));
  }
  return out;
}

}  // namespace scan2map
