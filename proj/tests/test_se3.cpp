#include "scan2map/se3.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "oracles.hpp"

namespace {

using scan2map::PerturbationSpec;
using scan2map::Pose;
using scan2map::Rng;
using scan2map::Twist;

Twist random_twist(Rng& rng, double rho_span, double phi_norm_max) {
  Twist xi;
  for (int i = 0; i < 3; ++i) xi.rho[i] = rng.next_uniform(-rho_span, rho_span);
  Eigen::Vector3d dir;
  for (int i = 0; i < 3; ++i) dir[i] = rng.next_uniform(-1.0, 1.0);
  if (dir.norm() < 1e-12) dir = Eigen::Vector3d::UnitX();
  xi.phi = dir.normalized() * rng.next_uniform(0.0, phi_norm_max);
  return xi;
}

TEST(Se3Exp, ZeroTwistIsIdentity) {
  const Pose p = scan2map::se3_exp(Twist{});
  EXPECT_LT((p.rotation - Eigen::Matrix3d::Identity()).norm(), 1e-15);
  EXPECT_LT(p.translation.norm(), 1e-15);
}

TEST(Se3Exp, PureTranslation) {
  const Pose p = scan2map::se3_exp(Twist{{1, 2, 3}, {0, 0, 0}});
  EXPECT_LT((p.rotation - Eigen::Matrix3d::Identity()).norm(), 1e-15);
  EXPECT_LT((p.translation - Eigen::Vector3d(1, 2, 3)).norm(), 1e-15);
}

TEST(Se3Exp, QuarterTurnAboutZMatchesMatrixExponential) {
  const Twist xi{{0, 0, 0}, {0, 0, std::numbers::pi / 2}};
  const Pose p = scan2map::se3_exp(xi);
  const Eigen::Matrix4d expected = oracles::expm_scaling_squaring(oracles::twist_matrix(xi));
  EXPECT_LT((oracles::pose_matrix(p) - expected).norm(), 1e-12);
  // 90 degrees about z maps x onto y.
  EXPECT_LT((p.rotation * Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitY()).norm(), 1e-12);
}

TEST(Se3Exp, MatchesMatrixExponentialOnRandomTwists) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Twist xi = random_twist(rng, 5.0, 3.0);
    const Pose p = scan2map::se3_exp(xi);
    const Eigen::Matrix4d expected = oracles::expm_scaling_squaring(oracles::twist_matrix(xi));
    ASSERT_LT((oracles::pose_matrix(p) - expected).norm(), 1e-10);
  }
}

TEST(Se3Exp, RejectsNonFinite) {
  Twist xi;
  xi.rho[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(scan2map::se3_exp(xi), std::invalid_argument);
}

TEST(Se3Log, IdentityGivesZero) {
  EXPECT_LT(scan2map::se3_log(Pose::Identity()).vector().norm(), 1e-15);
}

TEST(Se3Log, PureTranslation) {
  Pose p;
  p.translation = Eigen::Vector3d(1, 0, 0);
  const Twist xi = scan2map::se3_log(p);
  EXPECT_LT((xi.rho - Eigen::Vector3d(1, 0, 0)).norm(), 1e-15);
  EXPECT_LT(xi.phi.norm(), 1e-15);
}

TEST(Se3Log, RoundTripAtHalfRadian) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    Twist xi = random_twist(rng, 2.0, 0.0);
    Eigen::Vector3d axis;
    for (int k = 0; k < 3; ++k) axis[k] = rng.next_uniform(-1.0, 1.0);
    xi.phi = axis.normalized() * 0.5;
    const Pose p = scan2map::se3_exp(xi);
    const Pose back = scan2map::se3_exp(scan2map::se3_log(p));
    ASSERT_LT((oracles::pose_matrix(back) - oracles::pose_matrix(p)).norm(), 1e-9);
  }
}

TEST(Se3Log, ExpLogRoundTripProperty) {
  Rng rng(17);
  for (int i = 0; i < 10000; ++i) {
    const Twist xi = random_twist(rng, 10.0, 3.0);
    const Twist back = scan2map::se3_log(scan2map::se3_exp(xi));
    ASSERT_LT((back.vector() - xi.vector()).norm(), 1e-8);
  }
}

TEST(Se3Log, ThrowsNearPi) {
  Pose p;
  p.rotation = scan2map::so3_exp(Eigen::Vector3d(0, 0, std::numbers::pi - 1e-9));
  EXPECT_THROW(scan2map::se3_log(p), scan2map::BranchAmbiguityError);
}

TEST(Pose, ComposeInverseIsIdentity) {
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const Pose p = scan2map::se3_exp(random_twist(rng, 5.0, 3.0));
    const Pose id = p * p.inverse();
    ASSERT_LT((id.rotation - Eigen::Matrix3d::Identity()).norm(), 1e-9);
    ASSERT_LT(id.translation.norm(), 1e-9);
  }
}

TEST(Pose, DeterminantStableOverLongCompositionChains) {
  Rng rng(29);
  Pose acc = Pose::Identity();
  for (int i = 0; i < 1000; ++i) {
    acc = acc * scan2map::se3_exp(random_twist(rng, 1.0, 1.0));
  }
  EXPECT_NEAR(acc.rotation.determinant(), 1.0, 1e-9);
  EXPECT_LT((acc.rotation.transpose() * acc.rotation - Eigen::Matrix3d::Identity()).norm(), 1e-9);
}

TEST(TranslationError, PythagoreanTriple) {
  Pose a, b;
  b.translation = Eigen::Vector3d(3, 4, 0);
  EXPECT_DOUBLE_EQ(scan2map::translation_error(a, b), 5.0);
  EXPECT_DOUBLE_EQ(scan2map::translation_error(a, a), 0.0);
}

TEST(TranslationError, MatchesComponentArithmetic) {
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    Pose a, b;
    for (int k = 0; k < 3; ++k) {
      a.translation[k] = rng.next_uniform(-10, 10);
      b.translation[k] = rng.next_uniform(-10, 10);
    }
    const double dx = a.translation.x() - b.translation.x();
    const double dy = a.translation.y() - b.translation.y();
    const double dz = a.translation.z() - b.translation.z();
    ASSERT_NEAR(scan2map::translation_error(a, b), std::sqrt(dx * dx + dy * dy + dz * dz), 1e-12);
  }
}

TEST(RotationError, ConstructedRelativeRotation) {
  Rng rng(37);
  for (const double theta : {0.01, 0.087, 0.5, 1.0, 3.0}) {
    Eigen::Vector3d axis;
    for (int k = 0; k < 3; ++k) axis[k] = rng.next_uniform(-1.0, 1.0);
    axis.normalize();
    const Pose a = scan2map::se3_exp(random_twist(rng, 2.0, 1.0));
    Pose b = a;
    b.rotation = scan2map::so3_exp(axis * theta) * a.rotation;
    ASSERT_NEAR(scan2map::rotation_error(a, b), theta, 1e-9);
  }
}

TEST(RotationError, SymmetricInArguments) {
  Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const Pose a = scan2map::se3_exp(random_twist(rng, 2.0, 2.5));
    const Pose b = scan2map::se3_exp(random_twist(rng, 2.0, 2.5));
    ASSERT_NEAR(scan2map::rotation_error(a, b), scan2map::rotation_error(b, a), 1e-12);
  }
}

TEST(RotationError, InvariantUnderCommonLeftComposition) {
  Rng rng(43);
  for (int i = 0; i < 100; ++i) {
    const Pose a = scan2map::se3_exp(random_twist(rng, 2.0, 1.5));
    const Pose b = scan2map::se3_exp(random_twist(rng, 2.0, 1.5));
    const Pose t = scan2map::se3_exp(random_twist(rng, 2.0, 1.5));
    ASSERT_NEAR(scan2map::rotation_error(t * a, t * b), scan2map::rotation_error(a, b), 1e-10);
  }
}

TEST(SamplePerturbation, ZeroSigmaGivesZeroTwist) {
  PerturbationSpec spec;
  spec.sigma.setZero();
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(scan2map::sample_perturbation(spec, rng).vector().norm(), 0.0);
  }
}

TEST(SamplePerturbation, PaperSigmasReproduceWithinTwoPercent) {
  PerturbationSpec spec;  // defaults are the evaluation values
  Rng rng(2025);
  const int n = 100000;
  scan2map::Vector6d sq = scan2map::Vector6d::Zero();
  for (int i = 0; i < n; ++i) {
    const auto v = scan2map::sample_perturbation(spec, rng).vector();
    sq += v.cwiseProduct(v);
  }
  for (int k = 0; k < 6; ++k) {
    const double sample_std = std::sqrt(sq[k] / n);
    ASSERT_NEAR(sample_std, spec.sigma[k], 0.02 * spec.sigma[k]) << "axis " << k;
  }
}

TEST(SamplePerturbation, SameSeedSameSequence) {
  PerturbationSpec spec;
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(scan2map::sample_perturbation(spec, a).vector(),
              scan2map::sample_perturbation(spec, b).vector());
  }
}

TEST(SamplePerturbation, EmpiricalCovarianceIsDiagonal) {
  PerturbationSpec spec;
  Rng rng(77);
  const int n = 100000;
  Eigen::Matrix<double, 6, 6> cov = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < n; ++i) {
    const auto v = scan2map::sample_perturbation(spec, rng).vector();
    cov += v * v.transpose();
  }
  cov /= n;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) {
      if (r == c) {
        ASSERT_NEAR(cov(r, c), spec.sigma[r] * spec.sigma[r],
                    0.04 * spec.sigma[r] * spec.sigma[r]);
      } else {
        ASSERT_NEAR(cov(r, c), 0.0, 2e-4);
      }
    }
  }
}

TEST(PerturbPose, ZeroSpecReturnsGroundTruth) {
  PerturbationSpec spec;
  spec.sigma.setZero();
  Rng rng(5);
  const Pose gt = scan2map::se3_exp(Twist{{1, 2, 3}, {0.2, -0.1, 0.3}});
  const Pose out = scan2map::perturb_pose(gt, spec, rng);
  EXPECT_LT((oracles::pose_matrix(out) - oracles::pose_matrix(gt)).norm(), 1e-15);
}

TEST(PerturbPose, ForcedTranslationComposesOnLeft) {
  const Pose gt = Pose::Identity();
  const Pose out = scan2map::se3_exp(Twist{{0.1, 0, 0}, {0, 0, 0}}) * gt;
  EXPECT_LT((out.translation - Eigen::Vector3d(0.1, 0, 0)).norm(), 1e-15);
}

TEST(PerturbPose, ForcedRotationMatchesDirectMatrixProduct) {
  Pose gt;
  gt.translation = Eigen::Vector3d(5, 5, 0);
  const Twist xi{{0, 0, 0}, {0, 0, 0.09}};
  const Pose out = scan2map::se3_exp(xi) * gt;
  const Eigen::Matrix4d expected =
      oracles::expm_scaling_squaring(oracles::twist_matrix(xi)) * oracles::pose_matrix(gt);
  EXPECT_LT((oracles::pose_matrix(out) - expected).norm(), 1e-12);
}

TEST(QuaternionRow, RoundTripIsTight) {
  Rng rng(53);
  for (int i = 0; i < 200; ++i) {
    const Pose p = scan2map::se3_exp(random_twist(rng, 10.0, 3.0));
    const Pose back = scan2map::pose_from_quaternion_row(scan2map::pose_to_quaternion_row(p));
    ASSERT_LT((oracles::pose_matrix(back) - oracles::pose_matrix(p)).norm(), 1e-12);
  }
}

}  // namespace
