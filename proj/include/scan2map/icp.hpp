#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <vector>

#include "scan2map/kd_tree.hpp"
#include "scan2map/normal_estimation.hpp"
#include "scan2map/point_cloud.hpp"
#include "scan2map/se3.hpp"

namespace scan2map {

enum class IcpVariant { PointToPoint, PointToPlane };

struct IcpConfig {
  IcpVariant variant = IcpVariant::PointToPoint;
  double max_correspondence = 0.7;    // meters
  int max_iterations = 150;
  double cauchy_scale = 0.3;          // meters
  double translation_epsilon = 1e-4;  // meters
  double rotation_epsilon = 1e-5;     // radians
  int min_correspondences = 10;
  int normal_k = 10;  // neighborhood when reference normals must be estimated

  bool is_valid() const {
    return max_correspondence > 0.0 && max_iterations >= 1 && cauchy_scale > 0.0 &&
           translation_epsilon >= 0.0 && rotation_epsilon >= 0.0 && min_correspondences >= 3 &&
           normal_k >= 3;
  }
};

struct IcpResult {
  Pose pose;  // reading-to-reference
  int iterations = 0;
  bool converged = false;
  double final_rms_residual = 0.0;  // meters, unweighted RMS over surviving pairs
  int correspondence_count = 0;
};

/// Robust weight w = 1 / (1 + (r/c)^2), in (0, 1], monotone non-increasing
/// in |r|.
inline double cauchy_weight(double residual, double scale) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("cauchy_weight: scale must be positive");
  }
  const double q = residual / scale;
  return 1.0 / (1.0 + q * q);
}

struct PointPair {
  Eigen::Vector3d source;
  Eigen::Vector3d target;
  double weight = 1.0;
};

struct PlanePair {
  Eigen::Vector3d source;
  Eigen::Vector3d target;
  Eigen::Vector3d normal;  // unit
  double weight = 1.0;
};

/// Weighted Kabsch alignment: the pose minimizing sum w_i ||T a_i - b_i||^2
/// via weighted centroids, weighted cross-covariance, and SVD with reflection
/// correction. Requires rank >= 2 source geometry (non-collinear).
inline Pose solve_point_to_point(std::span<const PointPair> pairs) {
  if (pairs.size() < 3) {
    throw DegenerateGeometryError("solve_point_to_point: need at least 3 pairs");
  }
  double total = 0.0;
  Eigen::Vector3d ca = Eigen::Vector3d::Zero();
  Eigen::Vector3d cb = Eigen::Vector3d::Zero();
  for (const auto& pr : pairs) {
    total += pr.weight;
    ca += pr.weight * pr.source;
    cb += pr.weight * pr.target;
  }
  if (!(total > 0.0)) {
    throw DegenerateGeometryError("solve_point_to_point: total weight must be positive");
  }
  ca /= total;
  cb /= total;
  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  for (const auto& pr : pairs) {
    cross += pr.weight * (pr.source - ca) * (pr.target - cb).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (sv(1) <= 1e-12 * sv(0) || sv(0) <= 0.0) {
    throw DegenerateGeometryError("solve_point_to_point: collinear or coincident pairs");
  }
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) {
    d(2, 2) = -1.0;
  }
  Pose out;
  out.rotation = svd.matrixV() * d * svd.matrixU().transpose();
  out.translation = cb - out.rotation * ca;
  return out;
}

/// One Gauss-Newton step of the point-to-plane objective: the twist
/// minimizing sum w_i (n_i . (exp(xi^) a_i - b_i))^2 linearized at xi = 0,
/// solved through 6x6 weighted normal equations. The system is normalized by
/// the total weight and damped with lambda = 1e-6 on the diagonal so
/// rank-deficient geometry (corridors, planes) yields a bounded update in the
/// unconstrained directions instead of a solver failure.
inline Twist solve_point_to_plane(std::span<const PlanePair> pairs) {
  constexpr double kDamping = 1e-6;
  constexpr double kMaxCondition = 1e12;
  if (pairs.size() < 6) {
    throw DegenerateGeometryError("solve_point_to_plane: need at least 6 pairs");
  }
  Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
  Vector6d g = Vector6d::Zero();
  double total = 0.0;
  for (const auto& pr : pairs) {
    Vector6d j;
    j.head<3>() = pr.normal;
    j.tail<3>() = pr.source.cross(pr.normal);
    const double r = pr.normal.dot(pr.source - pr.target);
    h.noalias() += pr.weight * j * j.transpose();
    g.noalias() -= pr.weight * r * j;
    total += pr.weight;
  }
  if (!(total > 0.0)) {
    throw DegenerateGeometryError("solve_point_to_plane: total weight must be positive");
  }
  h /= total;
  g /= total;
  h.diagonal().array() += kDamping;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(h);
  const auto& ev = eig.eigenvalues();
  if (!(ev(0) > 0.0) || ev(5) / ev(0) > kMaxCondition) {
    throw DegenerateGeometryError("solve_point_to_plane: singular system after damping");
  }
  const Vector6d xi = eig.eigenvectors() * (eig.eigenvectors().transpose() * g).cwiseQuotient(ev);
  return Twist::FromVector(xi);
}

namespace detail {

struct Correspondence {
  std::size_t reading_index;
  std::size_t reference_index;
  double distance;
};

inline void find_correspondences(const std::vector<Eigen::Vector3d>& transformed,
                                 const SpatialIndex& ref_index, double max_distance,
                                 std::vector<Correspondence>& out) {
  out.clear();
  for (std::size_t i = 0; i < transformed.size(); ++i) {
    const auto nb = ref_index.nearest(transformed[i]);
    if (nb.distance <= max_distance) {
      out.push_back({i, nb.index, nb.distance});
    }
  }
}

inline double rotation_angle(const Eigen::Matrix3d& r) {
  return std::acos(std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0));
}

}  // namespace detail

/// Iterative closest point, reading registered against the reference through
/// its spatial index. Each iteration transforms the reading by the current
/// pose, matches every reading point to its nearest reference point, drops
/// pairs beyond max_correspondence, reweights survivors with the Cauchy
/// weight of their residual, and applies the variant's solver (weighted
/// Kabsch, or the damped point-to-plane step). Stops when the pose update
/// falls below both epsilons (converged) or at max_iterations.
///
/// For PointToPlane a reference without normals gets them estimated here
/// (normal_k neighbors, viewpoint at the initial sensor position); the sign
/// of a normal never changes the weighted objective.
inline IcpResult register_clouds(const PointCloud& reading, const PointCloud& reference,
                                 const SpatialIndex& ref_index, const Pose& init,
                                 const IcpConfig& cfg) {
  if (reading.empty() || reference.empty()) {
    throw EmptyInputError("register_clouds: empty reading or reference");
  }
  if (!cfg.is_valid()) {
    throw std::invalid_argument("register_clouds: invalid config");
  }
  const bool plane = cfg.variant == IcpVariant::PointToPlane;
  const std::vector<Eigen::Vector3d>* normals = &reference.normals;
  std::vector<Eigen::Vector3d> local_normals;
  if (plane && !reference.has_normals()) {
    local_normals =
        estimate_normals(reference, static_cast<std::size_t>(cfg.normal_k), init.translation)
            .normals;
    normals = &local_normals;
  }

  Pose pose = init;
  std::vector<Eigen::Vector3d> transformed(reading.size());
  std::vector<detail::Correspondence> matches;
  std::vector<PointPair> point_pairs;
  std::vector<PlanePair> plane_pairs;
  IcpResult result;
  result.pose = pose;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    for (std::size_t i = 0; i < reading.size(); ++i) {
      transformed[i] = pose * reading.points[i];
    }
    detail::find_correspondences(transformed, ref_index, cfg.max_correspondence, matches);
    if (static_cast<int>(matches.size()) < cfg.min_correspondences) {
      throw DegenerateGeometryError("register_clouds: too few correspondences");
    }

    Pose delta;
    if (plane) {
      plane_pairs.clear();
      plane_pairs.reserve(matches.size());
      for (const auto& m : matches) {
        const Eigen::Vector3d& n = (*normals)[m.reference_index];
        const double r = n.dot(transformed[m.reading_index] - reference.points[m.reference_index]);
        plane_pairs.push_back({transformed[m.reading_index], reference.points[m.reference_index],
                               n, cauchy_weight(r, cfg.cauchy_scale)});
      }
      delta = se3_exp(solve_point_to_plane(plane_pairs));
    } else {
      point_pairs.clear();
      point_pairs.reserve(matches.size());
      for (const auto& m : matches) {
        point_pairs.push_back({transformed[m.reading_index], reference.points[m.reference_index],
                               cauchy_weight(m.distance, cfg.cauchy_scale)});
      }
      delta = solve_point_to_point(point_pairs);
    }

    pose = (delta * pose).orthonormalized();
    result.iterations = iter;
    if (delta.translation.norm() < cfg.translation_epsilon &&
        detail::rotation_angle(delta.rotation) < cfg.rotation_epsilon) {
      result.converged = true;
      break;
    }
  }

  // Final correspondences at the converged pose, for reporting.
  for (std::size_t i = 0; i < reading.size(); ++i) {
    transformed[i] = pose * reading.points[i];
  }
  detail::find_correspondences(transformed, ref_index, cfg.max_correspondence, matches);
  double sq_sum = 0.0;
  for (const auto& m : matches) {
    double r = m.distance;
    if (plane) {
      r = (*normals)[m.reference_index].dot(transformed[m.reading_index] -
                                            reference.points[m.reference_index]);
    }
    sq_sum += r * r;
  }
  result.pose = pose;
  result.correspondence_count = static_cast<int>(matches.size());
  result.final_rms_residual =
      matches.empty() ? 0.0 : std::sqrt(sq_sum / static_cast<double>(matches.size()));
  return result;
}

}  // namespace scan2map
