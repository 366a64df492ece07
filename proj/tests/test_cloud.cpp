#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <numbers>

#include "oracles.hpp"
#include "scan2map/kd_tree.hpp"
#include "scan2map/normal_estimation.hpp"
#include "scan2map/point_cloud.hpp"
#include "scan2map/voxel_filter.hpp"

namespace {

using scan2map::NoiseSpec;
using scan2map::PointCloud;
using scan2map::Rng;
using scan2map::SpatialIndex;

PointCloud random_cloud(Rng& rng, std::size_t n, double span) {
  PointCloud c;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.points.emplace_back(rng.next_uniform(-span, span), rng.next_uniform(-span, span),
                          rng.next_uniform(-span, span));
  }
  return c;
}

TEST(VoxelDownsample, EmptyCloudStaysEmpty) {
  EXPECT_TRUE(scan2map::voxel_downsample(PointCloud{}, 0.1).empty());
}

TEST(VoxelDownsample, RejectsNonPositiveVoxel) {
  EXPECT_THROW(scan2map::voxel_downsample(PointCloud{}, 0.0), std::invalid_argument);
  EXPECT_THROW(scan2map::voxel_downsample(PointCloud{}, -1.0), std::invalid_argument);
}

TEST(VoxelDownsample, TwoClosePointsCollapseToMidpoint) {
  PointCloud c;
  c.points.emplace_back(0.045, 0.05, 0.05);
  c.points.emplace_back(0.055, 0.05, 0.05);
  const PointCloud out = scan2map::voxel_downsample(c, 0.1);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_LT((out.points[0] - Eigen::Vector3d(0.05, 0.05, 0.05)).norm(), 1e-12);
}

TEST(VoxelDownsample, BoundaryPointGoesToHigherCell) {
  PointCloud c;
  c.points.emplace_back(0.1, 0.0, 0.0);   // exactly on the cell boundary
  c.points.emplace_back(0.05, 0.0, 0.0);  // lower cell
  EXPECT_EQ(scan2map::voxel_downsample(c, 0.1).size(), 2u);
}

TEST(VoxelDownsample, CountMatchesBruteForceHash) {
  Rng rng(8);
  const PointCloud c = random_cloud(rng, 10000, 0.5);  // 1 m cube
  const PointCloud out = scan2map::voxel_downsample(c, 0.1);
  EXPECT_EQ(out.size(), oracles::occupied_voxel_count(c.points, 0.1));
}

TEST(VoxelDownsample, OutputWithinHalfDiagonalOfInput) {
  Rng rng(9);
  const PointCloud c = random_cloud(rng, 2000, 1.0);
  const double voxel = 0.1;
  const PointCloud out = scan2map::voxel_downsample(c, voxel);
  ASSERT_LE(out.size(), c.size());
  const SpatialIndex index(c);
  for (const auto& p : out.points) {
    ASSERT_LE(index.nearest(p).distance, voxel * std::sqrt(3.0) / 2.0 + 1e-12);
  }
}

TEST(VoxelDownsample, IdempotentOnOccupiedCellCount) {
  Rng rng(10);
  const PointCloud c = random_cloud(rng, 5000, 0.5);
  const PointCloud once = scan2map::voxel_downsample(c, 0.1);
  const PointCloud twice = scan2map::voxel_downsample(once, 0.1);
  EXPECT_EQ(oracles::occupied_voxel_count(once.points, 0.1),
            oracles::occupied_voxel_count(twice.points, 0.1));
}

TEST(SpatialIndex, SinglePoint) {
  PointCloud c;
  c.points.emplace_back(1, 2, 3);
  const SpatialIndex index(c);
  const auto nb = index.nearest(Eigen::Vector3d(-4, 0, 9));
  EXPECT_EQ(nb.index, 0u);
}

TEST(SpatialIndex, GridNodeQueryHasZeroDistance) {
  PointCloud c;
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 5; ++y)
      for (int z = 0; z < 5; ++z) c.points.emplace_back(x, y, z);
  const SpatialIndex index(c);
  const auto nb = index.nearest(Eigen::Vector3d(2, 3, 4));
  EXPECT_DOUBLE_EQ(nb.distance, 0.0);
  EXPECT_LT((c.points[nb.index] - Eigen::Vector3d(2, 3, 4)).norm(), 1e-15);
}

TEST(SpatialIndex, EmptyIndexThrows) {
  const SpatialIndex index{PointCloud{}};
  EXPECT_THROW(index.nearest(Eigen::Vector3d::Zero()), scan2map::EmptyInputError);
}

TEST(SpatialIndex, AgreesWithLinearScanIncludingTies) {
  Rng rng(12);
  PointCloud c = random_cloud(rng, 1000, 5.0);
  // Duplicate coordinates force tie-breaking by index.
  for (int i = 0; i < 50; ++i) {
    c.points.push_back(c.points[static_cast<std::size_t>(rng.next_uniform(0, 1000))]);
  }
  const SpatialIndex index(c);
  for (int q = 0; q < 1000; ++q) {
    Eigen::Vector3d query(rng.next_uniform(-6, 6), rng.next_uniform(-6, 6),
                          rng.next_uniform(-6, 6));
    if (q % 5 == 0) query = c.points[static_cast<std::size_t>(rng.next_uniform(0, c.size()))];
    const auto expected = oracles::linear_scan_nearest(c.points, query);
    const auto got = index.nearest(query);
    ASSERT_EQ(got.index, expected.first);
    ASSERT_DOUBLE_EQ(got.distance, expected.second);
  }
}

TEST(SpatialIndex, KnnSortedAndExact) {
  Rng rng(13);
  const PointCloud c = random_cloud(rng, 500, 2.0);
  const SpatialIndex index(c);
  for (int q = 0; q < 50; ++q) {
    const Eigen::Vector3d query(rng.next_uniform(-2, 2), rng.next_uniform(-2, 2),
                                rng.next_uniform(-2, 2));
    const auto got = index.knn(query, 10);
    ASSERT_EQ(got.size(), 10u);
    // Sorted by distance, and the set matches a sorted linear scan.
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < c.size(); ++i) {
      all.emplace_back((c.points[i] - query).norm(), i);
    }
    std::sort(all.begin(), all.end());
    for (std::size_t k = 0; k < got.size(); ++k) {
      ASSERT_EQ(got[k].index, all[k].second);
      ASSERT_DOUBLE_EQ(got[k].distance, all[k].first);
    }
  }
}

TEST(RadiusCrop, LargeRadiusKeepsEverything) {
  Rng rng(14);
  const PointCloud c = random_cloud(rng, 500, 2.0);
  const PointCloud out = scan2map::radius_crop(c, Eigen::Vector3d::Zero(), 100.0);
  ASSERT_EQ(out.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    ASSERT_EQ(out.points[i], c.points[i]);  // order preserved
  }
}

TEST(RadiusCrop, FarCenterGivesEmpty) {
  Rng rng(15);
  const PointCloud c = random_cloud(rng, 100, 1.0);
  EXPECT_TRUE(scan2map::radius_crop(c, Eigen::Vector3d(1000, 0, 0), 1.0).empty());
}

TEST(RadiusCrop, MatchesBruteForceFilter) {
  Rng rng(16);
  const PointCloud c = random_cloud(rng, 5000, 50.0);
  const Eigen::Vector3d center(3, -2, 1);
  const double radius = 35.0;
  const PointCloud out = scan2map::radius_crop(c, center, radius);
  std::size_t expected = 0;
  for (const auto& p : c.points) {
    if ((p - center).norm() <= radius) ++expected;
  }
  EXPECT_EQ(out.size(), expected);
  for (const auto& p : out.points) {
    ASSERT_LE((p - center).norm(), radius);
  }
}

TEST(RadiusCrop, RejectsNonPositiveRadius) {
  EXPECT_THROW(scan2map::radius_crop(PointCloud{}, Eigen::Vector3d::Zero(), 0.0),
               std::invalid_argument);
}

TEST(AddNoise, ZeroSigmaIsIdentity) {
  Rng source(17);
  const PointCloud c = random_cloud(source, 100, 1.0);
  Rng rng(18);
  const PointCloud out = scan2map::add_noise(c, NoiseSpec{0.0, 0}, rng);
  for (std::size_t i = 0; i < c.size(); ++i) {
    ASSERT_EQ(out.points[i], c.points[i]);
  }
}

TEST(AddNoise, SampleStdWithinTwoPercent) {
  PointCloud c;
  c.points.assign(100000, Eigen::Vector3d::Zero());
  Rng rng(19);
  const double sigma = 0.1;
  const PointCloud out = scan2map::add_noise(c, NoiseSpec{sigma, 0}, rng);
  Eigen::Vector3d sq = Eigen::Vector3d::Zero();
  for (const auto& p : out.points) sq += p.cwiseProduct(p);
  for (int k = 0; k < 3; ++k) {
    const double std_k = std::sqrt(sq[k] / static_cast<double>(out.size()));
    ASSERT_NEAR(std_k, sigma, 0.02 * sigma);
  }
}

TEST(AddNoise, SameSeedBitIdentical) {
  Rng source(20);
  const PointCloud c = random_cloud(source, 500, 1.0);
  Rng a(21), b(21);
  const PointCloud outa = scan2map::add_noise(c, NoiseSpec{0.1, 0}, a);
  const PointCloud outb = scan2map::add_noise(c, NoiseSpec{0.1, 0}, b);
  for (std::size_t i = 0; i < c.size(); ++i) {
    ASSERT_EQ(outa.points[i], outb.points[i]);
  }
}

TEST(EstimateNormals, PlanarPatchPointsUp) {
  Rng rng(22);
  PointCloud c;
  for (int i = 0; i < 500; ++i) {
    c.points.emplace_back(rng.next_uniform(-1, 1), rng.next_uniform(-1, 1), 0.0);
  }
  const PointCloud out = scan2map::estimate_normals(c, 10, Eigen::Vector3d(0, 0, 5));
  ASSERT_TRUE(out.has_normals());
  for (const auto& n : out.normals) {
    ASSERT_LT((n - Eigen::Vector3d::UnitZ()).norm(), 1e-3);
  }
}

TEST(EstimateNormals, SphereNormalsPointToCenter) {
  Rng rng(23);
  PointCloud c;
  const double radius = 2.0;
  for (int i = 0; i < 3000; ++i) {
    // Uniform direction via normalized gaussians.
    Eigen::Vector3d d(rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian());
    c.points.push_back(radius * d.normalized());
  }
  const PointCloud out = scan2map::estimate_normals(c, 10, Eigen::Vector3d::Zero());
  const double max_angle = 5.0 * std::numbers::pi / 180.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Eigen::Vector3d inward = -out.points[i].normalized();
    const double angle = std::acos(std::clamp(out.normals[i].dot(inward), -1.0, 1.0));
    ASSERT_LT(angle, max_angle);
  }
}

TEST(EstimateNormals, CollinearNeighborhoodGivesPerpendicularNormal) {
  PointCloud c;
  for (int i = 0; i < 30; ++i) {
    c.points.emplace_back(0.1 * i, 0.0, 0.0);
  }
  const PointCloud out = scan2map::estimate_normals(c, 5, Eigen::Vector3d(0, 3, 0));
  for (const auto& n : out.normals) {
    ASSERT_NEAR(n.norm(), 1.0, 1e-9);
    ASSERT_NEAR(n.dot(Eigen::Vector3d::UnitX()), 0.0, 1e-9);  // perpendicular to the line
    ASSERT_GE(n.y(), 0.0);                                    // oriented toward the viewpoint
  }
}

TEST(EstimateNormals, ViewpointConsistencyProperty) {
  Rng rng(24);
  PointCloud c = random_cloud(rng, 800, 3.0);
  const Eigen::Vector3d viewpoint(0, 0, 10);
  const PointCloud out = scan2map::estimate_normals(c, 10, viewpoint);
  for (std::size_t i = 0; i < out.size(); ++i) {
    ASSERT_GE(out.normals[i].dot(viewpoint - out.points[i]), 0.0);
    ASSERT_NEAR(out.normals[i].norm(), 1.0, 1e-9);
  }
}

TEST(EstimateNormals, TooFewPointsThrows) {
  PointCloud c;
  for (int i = 0; i < 5; ++i) c.points.emplace_back(i, 0, 0);
  EXPECT_THROW(scan2map::estimate_normals(c, 10, Eigen::Vector3d::Zero()),
               scan2map::InsufficientPointsError);
  EXPECT_THROW(scan2map::estimate_normals(c, 2, Eigen::Vector3d::Zero()), std::invalid_argument);
}

}  // namespace
