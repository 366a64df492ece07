#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>

#include "scan2map/errors.hpp"
#include "scan2map/rng.hpp"

namespace scan2map {

using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Angle below which exp/log switch to their second-order Taylor expansions.
/// Below this the closed forms lose digits to cancellation in float64.
inline constexpr double kSmallAngle = 1e-8;

/// Angular distance from pi at which the SO(3) logarithm is rejected as
/// branch-ambiguous.
inline constexpr double kPiMargin = 1e-6;

/// Tangent-space pose increment: translational part first, rotational second.
struct Twist {
  Eigen::Vector3d rho = Eigen::Vector3d::Zero();  // meters
  Eigen::Vector3d phi = Eigen::Vector3d::Zero();  // radians

  Twist() = default;
  Twist(const Eigen::Vector3d& rho_in, const Eigen::Vector3d& phi_in) : rho(rho_in), phi(phi_in) {}

  Vector6d vector() const {
    Vector6d v;
    v << rho, phi;
    return v;
  }

  static Twist FromVector(const Vector6d& v) { return Twist(v.head<3>(), v.tail<3>()); }

  bool is_finite() const { return rho.allFinite() && phi.allFinite(); }
};

/// Rigid transform on SE(3), stored as rotation matrix plus translation.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Pose() = default;
  Pose(const Eigen::Matrix3d& rot, const Eigen::Vector3d& trans) : rotation(rot), translation(trans) {}

  static Pose Identity() { return Pose(); }

  Pose inverse() const {
    Pose inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
  }

  /// Composition: (*this) then applied after rhs, i.e. result = this ∘ rhs.
  Pose operator*(const Pose& rhs) const {
    Pose out;
    out.rotation = rotation * rhs.rotation;
    out.translation = rotation * rhs.translation + translation;
    return out;
  }

  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const { return rotation * p + translation; }

  /// Closest rotation in Frobenius norm (polar decomposition via SVD), used to
  /// scrub drift after long composition chains.
  Pose orthonormalized() const {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
      Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
      flip(2, 2) = -1.0;
      r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return Pose(r, translation);
  }

  bool is_valid(double tol = 1e-9) const {
    if (!rotation.allFinite() || !translation.allFinite()) return false;
    const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).norm();
    return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
  }
};

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

inline Eigen::Vector3d vee(const Eigen::Matrix3d& s) {
  return Eigen::Vector3d(s(2, 1), s(0, 2), s(1, 0));
}

/// Rodrigues' formula; second-order Taylor below kSmallAngle.
inline Eigen::Matrix3d so3_exp(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d s = skew(phi);
  if (theta < kSmallAngle) {
    return Eigen::Matrix3d::Identity() + s + 0.5 * (s * s);
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Eigen::Matrix3d::Identity() + a * s + b * (s * s);
}

/// Rotation-vector logarithm. Throws BranchAmbiguityError within kPiMargin
/// of pi where the branch is not unique.
inline Eigen::Vector3d so3_log(const Eigen::Matrix3d& rot) {
  const double cos_theta = std::clamp((rot.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  if (theta > std::numbers::pi - kPiMargin) {
    throw BranchAmbiguityError("so3_log: rotation angle within 1e-6 of pi");
  }
  const Eigen::Vector3d w = vee(rot - rot.transpose());
  if (theta < kSmallAngle) {
    return 0.5 * w;
  }
  return (theta / (2.0 * std::sin(theta))) * w;
}

/// Left Jacobian of SO(3); second-order Taylor below kSmallAngle.
inline Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d s = skew(phi);
  if (theta < kSmallAngle) {
    return Eigen::Matrix3d::Identity() + 0.5 * s + (1.0 / 6.0) * (s * s);
  }
  const double t2 = theta * theta;
  const double b = (1.0 - std::cos(theta)) / t2;
  const double c = (theta - std::sin(theta)) / (t2 * theta);
  return Eigen::Matrix3d::Identity() + b * s + c * (s * s);
}

inline Eigen::Matrix3d so3_left_jacobian_inverse(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d s = skew(phi);
  if (theta < kSmallAngle) {
    return Eigen::Matrix3d::Identity() - 0.5 * s + (1.0 / 12.0) * (s * s);
  }
  const double c = 1.0 / (theta * theta) -
                   (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Eigen::Matrix3d::Identity() - 0.5 * s + c * (s * s);
}

/// Closed-form SE(3) exponential: Rodrigues rotation plus left-Jacobian
/// applied translation.
inline Pose se3_exp(const Twist& xi) {
  if (!xi.is_finite()) {
    throw std::invalid_argument("se3_exp: non-finite twist");
  }
  Pose p;
  p.rotation = so3_exp(xi.phi);
  p.translation = so3_left_jacobian(xi.phi) * xi.rho;
  return p;
}

/// SE(3) logarithm; inherits the pi branch restriction of so3_log.
inline Twist se3_log(const Pose& p) {
  Twist xi;
  xi.phi = so3_log(p.rotation);
  xi.rho = so3_left_jacobian_inverse(xi.phi) * p.translation;
  return xi;
}

inline double translation_error(const Pose& a, const Pose& b) {
  return (a.translation - b.translation).norm();
}

/// Angular distance e = ||log(C_a C_b^T)||, symmetric, in [0, pi).
inline double rotation_error(const Pose& a, const Pose& b) {
  return so3_log(a.rotation * b.rotation.transpose()).norm();
}

/// Per-axis standard deviations for twist sampling: three translational
/// sigmas in meters, three rotational in radians.
struct PerturbationSpec {
  Vector6d sigma = (Vector6d() << 0.1, 0.1, 0.1, 0.09, 0.09, 0.09).finished();
  std::uint64_t seed = 0;

  bool is_valid() const { return sigma.allFinite() && (sigma.array() >= 0.0).all(); }
};

/// Independent zero-mean Gaussian per axis, drawn in order
/// rho.x, rho.y, rho.z, phi.x, phi.y, phi.z (two rng outputs per draw).
inline Twist sample_perturbation(const PerturbationSpec& spec, Rng& rng) {
  if (!spec.is_valid()) {
    throw std::invalid_argument("sample_perturbation: sigma must be finite and non-negative");
  }
  Vector6d v;
  for (int i = 0; i < 6; ++i) {
    v[i] = rng.next_gaussian(spec.sigma[i]);
  }
  return Twist::FromVector(v);
}

/// Noise composed on the left of the ground truth: exp(xi^) * gt.
inline Pose perturb_pose(const Pose& gt, const PerturbationSpec& spec, Rng& rng) {
  return se3_exp(sample_perturbation(spec, rng)) * gt;
}

/// Serialization row (tx, ty, tz, qx, qy, qz, qw), unit quaternion with
/// qw >= 0 for a canonical sign.
inline std::array<double, 7> pose_to_quaternion_row(const Pose& p) {
  Eigen::Quaterniond q(p.rotation);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return {p.translation.x(), p.translation.y(), p.translation.z(), q.x(), q.y(), q.z(), q.w()};
}

inline Pose pose_from_quaternion_row(const std::array<double, 7>& row) {
  Eigen::Quaterniond q(row[6], row[3], row[4], row[5]);
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("pose_from_quaternion_row: quaternion norm must be positive");
  }
  q.normalize();
  return Pose(q.toRotationMatrix(), Eigen::Vector3d(row[0], row[1], row[2]));
}

}  // namespace scan2map
