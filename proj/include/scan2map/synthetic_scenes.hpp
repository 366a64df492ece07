#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>

#include "scan2map/point_cloud.hpp"
#include "scan2map/rng.hpp"

namespace scan2map {

enum class SceneKind { Corridor, FlatGround, WallOnly, Clutter, ForestCorridor, ObjectChange };

inline std::string scene_kind_name(SceneKind kind) {
  switch (kind) {
    case SceneKind::Corridor: return "corridor";
    case SceneKind::FlatGround: return "flat_ground";
    case SceneKind::WallOnly: return "wall_only";
    case SceneKind::Clutter: return "clutter";
    case SceneKind::ForestCorridor: return "forest_corridor";
    case SceneKind::ObjectChange: return "object_change";
  }
  return "unknown";
}

inline SceneKind scene_kind_from_name(const std::string& name) {
  if (name == "corridor") return SceneKind::Corridor;
  if (name == "flat_ground") return SceneKind::FlatGround;
  if (name == "wall_only") return SceneKind::WallOnly;
  if (name == "clutter") return SceneKind::Clutter;
  if (name == "forest_corridor") return SceneKind::ForestCorridor;
  if (name == "object_change") return SceneKind::ObjectChange;
  throw std::invalid_argument("unknown scene kind '" + name + "'");
}

struct SceneSpec {
  SceneKind kind = SceneKind::Clutter;
  double extent = 40.0;   // meters
  double density = 50.0;  // points per square meter of surface
  std::uint64_t seed = 0;

  bool is_valid() const { return extent > 0.0 && density > 0.0; }
};

namespace detail {

/// Uniform surface sampling of a parallelogram patch; llround(area * density)
/// points, two rng draws each.
inline void sample_rect(PointCloud& cloud, Rng& rng, const Eigen::Vector3d& corner,
                        const Eigen::Vector3d& edge_u, const Eigen::Vector3d& edge_v,
                        double density) {
  const double area = edge_u.cross(edge_v).norm();
  const auto n = static_cast<std::size_t>(std::llround(area * density));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.next_uniform();
    const double v = rng.next_uniform();
    cloud.points.push_back(corner + u * edge_u + v * edge_v);
  }
}

/// Lateral surface of a vertical cylinder.
inline void sample_cylinder(PointCloud& cloud, Rng& rng, const Eigen::Vector2d& center,
                            double radius, double z0, double z1, double density) {
  const double area = 2.0 * std::numbers::pi * radius * (z1 - z0);
  const auto n = static_cast<std::size_t>(std::llround(area * density));
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.next_uniform(0.0, 2.0 * std::numbers::pi);
    const double z = rng.next_uniform(z0, z1);
    cloud.points.emplace_back(center.x() + radius * std::cos(a),
                              center.y() + radius * std::sin(a), z);
  }
}

/// Four side faces plus top of an axis-aligned box; bottom face optional.
inline void sample_box(PointCloud& cloud, Rng& rng, const Eigen::Vector2d& center, double width,
                       double depth, double z0, double z1, double density,
                       bool with_bottom = false) {
  const double hx = 0.5 * width;
  const double hy = 0.5 * depth;
  const Eigen::Vector3d ex(width, 0, 0);
  const Eigen::Vector3d ey(0, depth, 0);
  const Eigen::Vector3d ez(0, 0, z1 - z0);
  const Eigen::Vector3d base_mm(center.x() - hx, center.y() - hy, z0);
  const Eigen::Vector3d base_pm(center.x() + hx, center.y() - hy, z0);
  const Eigen::Vector3d base_mp(center.x() - hx, center.y() + hy, z0);
  sample_rect(cloud, rng, base_mm, ex, ez, density);  // y = -hy face
  sample_rect(cloud, rng, base_mp, ex, ez, density);  // y = +hy face
  sample_rect(cloud, rng, base_mm, ey, ez, density);  // x = -hx face
  sample_rect(cloud, rng, base_pm, ey, ez, density);  // x = +hx face
  sample_rect(cloud, rng, Eigen::Vector3d(center.x() - hx, center.y() - hy, z1), ex, ey,
              density);  // top
  if (with_bottom) {
    sample_rect(cloud, rng, base_mm, ex, ey, density);
  }
}

inline void sample_ground(PointCloud& cloud, Rng& rng, double extent, double density) {
  const double h = 0.5 * extent;
  sample_rect(cloud, rng, Eigen::Vector3d(-h, -h, 0.0), Eigen::Vector3d(extent, 0, 0),
              Eigen::Vector3d(0, extent, 0), density);
}

// Corridor geometry: walls 4 m apart and 3 m tall, running the extent of the
// scene along x, over a ground strip.
inline constexpr double kCorridorHalfWidth = 2.0;
inline constexpr double kWallHeight = 3.0;
inline constexpr double kWallOnlyWidth = 10.0;

inline void sample_corridor(PointCloud& cloud, Rng& rng, double extent, double density) {
  const double l = extent;
  const Eigen::Vector3d along(l, 0, 0);
  const Eigen::Vector3d up(0, 0, kWallHeight);
  sample_rect(cloud, rng, Eigen::Vector3d(-0.5 * l, -kCorridorHalfWidth, 0), along, up, density);
  sample_rect(cloud, rng, Eigen::Vector3d(-0.5 * l, kCorridorHalfWidth, 0), along, up, density);
  sample_rect(cloud, rng, Eigen::Vector3d(-0.5 * l, -kCorridorHalfWidth, 0), along,
              Eigen::Vector3d(0, 2.0 * kCorridorHalfWidth, 0), density);
}

// The parked-car stand-in used by ObjectChange: a raised box body so every
// sample sits well above the ground plane (greater than typical change
// thresholds) and is detected in full.
inline constexpr double kCarLength = 4.2;
inline constexpr double kCarWidth = 1.8;
inline constexpr double kCarBodyZ0 = 0.45;
inline constexpr double kCarBodyZ1 = 1.95;
inline const Eigen::Vector2d kCarPosition{3.0, 0.0};

}  // namespace detail

/// Deterministic synthetic scene. All primitives are sampled uniformly at
/// spec.density with a fixed draw order, so identical specs yield
/// bit-identical clouds.
inline PointCloud generate(const SceneSpec& spec) {
  if (!spec.is_valid()) {
    throw std::invalid_argument("generate: extent and density must be positive");
  }
  Rng rng(derive_stream_seed(spec.seed, 0x5CE4E5ULL, static_cast<std::uint64_t>(spec.kind)));
  PointCloud cloud;
  switch (spec.kind) {
    case SceneKind::FlatGround: {
      detail::sample_ground(cloud, rng, spec.extent, spec.density);
      break;
    }
    case SceneKind::Corridor: {
      detail::sample_corridor(cloud, rng, spec.extent, spec.density);
      break;
    }
    case SceneKind::WallOnly: {
      detail::sample_ground(cloud, rng, spec.extent, spec.density);
      detail::sample_rect(cloud, rng,
                          Eigen::Vector3d(-0.5 * detail::kWallOnlyWidth, 5.0, 0.0),
                          Eigen::Vector3d(detail::kWallOnlyWidth, 0, 0),
                          Eigen::Vector3d(0, 0, detail::kWallHeight), spec.density);
      break;
    }
    case SceneKind::Clutter: {
      detail::sample_ground(cloud, rng, spec.extent, spec.density);
      // One object per ~20 m^2, half cylinders, half boxes, kept clear of the
      // sensor region at the origin.
      const auto objects = static_cast<std::size_t>(
          std::max(8.0, std::round(spec.extent * spec.extent / 20.0)));
      const double lim = 0.5 * spec.extent - 2.0;
      for (std::size_t i = 0; i < objects; ++i) {
        Eigen::Vector2d c;
        do {
          c.x() = rng.next_uniform(-lim, lim);
          c.y() = rng.next_uniform(-lim, lim);
        } while (c.norm() < 3.0);
        if (i % 2 == 0) {
          const double radius = rng.next_uniform(0.2, 0.6);
          const double height = rng.next_uniform(1.0, 3.0);
          detail::sample_cylinder(cloud, rng, c, radius, 0.0, height, spec.density);
        } else {
          const double width = rng.next_uniform(0.6, 2.2);
          const double depth = rng.next_uniform(0.6, 2.2);
          const double height = rng.next_uniform(0.8, 2.5);
          detail::sample_box(cloud, rng, c, width, depth, 0.0, height, spec.density);
        }
      }
      break;
    }
    case SceneKind::ForestCorridor: {
      // Trunk rows stand in for the corridor walls; ground strip below.
      const double l = spec.extent;
      detail::sample_rect(cloud, rng, Eigen::Vector3d(-0.5 * l, -4.0, 0.0),
                          Eigen::Vector3d(l, 0, 0), Eigen::Vector3d(0, 8.0, 0), spec.density);
      const double spacing = 1.2;
      const auto per_row = static_cast<std::size_t>(std::floor(l / spacing));
      for (const double side : {-1.0, 1.0}) {
        for (std::size_t i = 0; i < per_row; ++i) {
          const double x = -0.5 * l + (static_cast<double>(i) + 0.5) * spacing +
                           rng.next_uniform(-0.4, 0.4);
          const double y = side * detail::kCorridorHalfWidth + rng.next_uniform(-0.5, 0.5);
          const double radius = rng.next_uniform(0.12, 0.3);
          const double height = rng.next_uniform(3.0, 7.0);
          detail::sample_cylinder(cloud, rng, Eigen::Vector2d(x, y), radius, 0.0, height,
                                  spec.density);
        }
      }
      break;
    }
    case SceneKind::ObjectChange: {
      // Base scene of the pair; see generate_pair for the variant.
      detail::sample_ground(cloud, rng, spec.extent, spec.density);
      break;
    }
  }
  return cloud;
}

/// Reference scene and the same scene with the added object, both
/// deterministic per seed. Only valid for SceneKind::ObjectChange.
inline std::pair<PointCloud, PointCloud> generate_pair(const SceneSpec& spec) {
  if (spec.kind != SceneKind::ObjectChange) {
    throw std::invalid_argument("generate_pair: spec.kind must be ObjectChange");
  }
  PointCloud reference = generate(spec);
  PointCloud session = reference;
  Rng rng(derive_stream_seed(spec.seed, 0x0B1EC7ULL, 1));
  detail::sample_box(session, rng, detail::kCarPosition, detail::kCarLength, detail::kCarWidth,
                     detail::kCarBodyZ0, detail::kCarBodyZ1, spec.density, /*with_bottom=*/true);
  return {std::move(reference), std::move(session)};
}

}  // namespace scan2map
