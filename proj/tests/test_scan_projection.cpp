#include "scan2map/scan_projection.hpp"

#include <gtest/gtest.h>

#include <map>
#include <numbers>

#include "scan2map/kd_tree.hpp"
#include "scan2map/synthetic_scenes.hpp"

namespace {

using scan2map::BeamModel;
using scan2map::PointCloud;
using scan2map::Pose;
using scan2map::Rng;

// Bin assignment mirroring the projection definition, for the brute-force
// occlusion oracle.
struct BinId {
  int channel;
  int azimuth;
  bool operator<(const BinId& o) const {
    return channel < o.channel || (channel == o.channel && azimuth < o.azimuth);
  }
};

std::optional<BinId> bin_of(const Eigen::Vector3d& p, const BeamModel& model) {
  const double range = p.norm();
  if (range < 1e-12) return std::nullopt;
  const double elevation = std::asin(std::clamp(p.z() / range, -1.0, 1.0));
  const int channel =
      static_cast<int>(std::lround((elevation - model.elevation_min) / model.channel_spacing()));
  if (channel < 0 || channel >= model.channels) return std::nullopt;
  const double azimuth = std::atan2(p.y(), p.x());
  int az_bin = static_cast<int>(std::floor((azimuth + std::numbers::pi) / model.azimuth_step()));
  if (az_bin >= model.azimuth_steps) az_bin = 0;
  if (az_bin < 0) az_bin = 0;
  return BinId{channel, az_bin};
}

TEST(DefaultBeamModel, UpperBoundReachesCeilingAtRangeLimit) {
  const BeamModel m = scan2map::default_beam_model();
  EXPECT_NEAR(std::tan(m.elevation_max) * m.max_range, m.max_height, 1e-9);
}

TEST(DefaultBeamModel, UniformChannelSpacing) {
  const BeamModel m = scan2map::default_beam_model();
  const double spacing = m.channel_elevation(1) - m.channel_elevation(0);
  for (int c = 1; c + 1 < m.channels; ++c) {
    ASSERT_NEAR(m.channel_elevation(c + 1) - m.channel_elevation(c), spacing, 1e-12);
  }
  EXPECT_NEAR(m.angular_tolerance, 0.5 * spacing, 1e-15);
}

TEST(DefaultBeamModel, TotalRayCount) {
  const BeamModel m = scan2map::default_beam_model();
  EXPECT_EQ(m.channels * m.azimuth_steps, 28800);
}

TEST(ProjectScan, SinglePointInFrontReturnsIt) {
  PointCloud map;
  map.points.emplace_back(5.0, 0.0, 0.0);
  const PointCloud scan =
      scan2map::project_scan(map, Pose::Identity(), scan2map::default_beam_model());
  ASSERT_EQ(scan.size(), 1u);
  EXPECT_NEAR(scan.points[0].norm(), 5.0, 1e-12);
}

TEST(ProjectScan, NearerCollinearPointOccludesFarther) {
  PointCloud map;
  map.points.emplace_back(10.0, 0.0, 0.0);
  map.points.emplace_back(5.0, 0.0, 0.0);
  const PointCloud scan =
      scan2map::project_scan(map, Pose::Identity(), scan2map::default_beam_model());
  ASSERT_EQ(scan.size(), 1u);
  EXPECT_NEAR(scan.points[0].norm(), 5.0, 1e-12);
}

TEST(ProjectScan, EmptyMapThrows) {
  EXPECT_THROW(
      scan2map::project_scan(PointCloud{}, Pose::Identity(), scan2map::default_beam_model()),
      scan2map::EmptyInputError);
}

TEST(ProjectScan, RangeHeightAndElevationGates) {
  const BeamModel m = scan2map::default_beam_model();
  PointCloud map;
  map.points.emplace_back(m.max_range + 1.0, 0.0, 0.0);  // beyond range
  map.points.emplace_back(0.5, 0.0, 10.0);               // far above the elevation span
  map.points.emplace_back(2.0, 0.0, -8.0);               // far below the elevation span
  const PointCloud scan = scan2map::project_scan(map, Pose::Identity(), m);
  EXPECT_TRUE(scan.empty());
}

TEST(ProjectScan, DenseRoomSceneMatchesPerBinMinimumOracle) {
  scan2map::SceneSpec spec;
  spec.kind = scan2map::SceneKind::Clutter;
  spec.extent = 24.0;
  spec.density = 60.0;
  spec.seed = 4;
  const PointCloud map = scan2map::generate(spec);
  Pose sensor;
  sensor.translation = Eigen::Vector3d(0.5, -0.25, 1.7);
  const BeamModel model = scan2map::default_beam_model();
  const PointCloud scan = scan2map::project_scan(map, sensor, model);
  ASSERT_GT(scan.size(), 1000u);

  // Brute-force: per-bin minimum range among all map points, in sensor frame.
  const Eigen::Matrix3d rot_inv = sensor.rotation.transpose();
  std::map<BinId, double> min_range;
  for (const auto& mp : map.points) {
    const Eigen::Vector3d p = rot_inv * (mp - sensor.translation);
    const auto bin = bin_of(p, model);
    if (!bin) continue;
    auto [it, inserted] = min_range.try_emplace(*bin, p.norm());
    if (!inserted) it->second = std::min(it->second, p.norm());
  }
  for (const auto& sp : scan.points) {
    const auto bin = bin_of(sp, model);
    ASSERT_TRUE(bin.has_value());
    // Occlusion soundness: nothing in this bin is nearer than the return.
    ASSERT_LE(sp.norm(), min_range.at(*bin) + 1e-12);
    // Gates hold on every emitted return.
    ASSERT_LE(sp.norm(), model.max_range + 1e-9);
    ASSERT_LE(sp.z(), model.max_height + 1e-9);
  }
}

TEST(ProjectScan, ScanPointsAreMapPointsInSensorFrame) {
  scan2map::SceneSpec spec;
  spec.kind = scan2map::SceneKind::Corridor;
  spec.extent = 30.0;
  spec.density = 40.0;
  spec.seed = 5;
  const PointCloud map = scan2map::generate(spec);
  Pose sensor = scan2map::se3_exp(scan2map::Twist{{1.0, 0.5, 1.5}, {0.05, -0.02, 0.3}});
  const PointCloud scan = scan2map::project_scan(map, sensor, scan2map::default_beam_model());
  ASSERT_GT(scan.size(), 100u);
  const scan2map::SpatialIndex index(map);
  for (const auto& sp : scan.points) {
    ASSERT_LT(index.nearest(sensor * sp).distance, 1e-9);
  }
}

TEST(ProjectScan, DeterministicForIdenticalInputs) {
  scan2map::SceneSpec spec;
  spec.kind = scan2map::SceneKind::Clutter;
  spec.extent = 20.0;
  spec.density = 30.0;
  spec.seed = 6;
  const PointCloud map = scan2map::generate(spec);
  Pose sensor;
  sensor.translation = Eigen::Vector3d(0, 0, 1.7);
  const PointCloud a = scan2map::project_scan(map, sensor, scan2map::default_beam_model());
  const PointCloud b = scan2map::project_scan(map, sensor, scan2map::default_beam_model());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a.points[i], b.points[i]);
  }
}

TEST(ProjectScan, ForestCorridorAtMappingDensityYieldsPaperScaleScan) {
  scan2map::SceneSpec spec;
  spec.kind = scan2map::SceneKind::ForestCorridor;
  spec.extent = 40.0;
  spec.density = 100.0;  // 0.1 m voxel mapping density
  spec.seed = 7;
  const PointCloud map = scan2map::generate(spec);
  Pose sensor;
  sensor.translation = Eigen::Vector3d(0, 0, 1.7);
  const PointCloud scan = scan2map::project_scan(map, sensor, scan2map::default_beam_model());
  EXPECT_GE(scan.size(), 10000u);
  EXPECT_LE(scan.size(), 20000u);
}

}  // namespace
