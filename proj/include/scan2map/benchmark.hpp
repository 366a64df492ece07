#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "scan2map/change_detection.hpp"
#include "scan2map/icp.hpp"
#include "scan2map/normal_estimation.hpp"
#include "scan2map/ply_io.hpp"
#include "scan2map/point_cloud.hpp"
#include "scan2map/run_config.hpp"
#include "scan2map/scan_projection.hpp"
#include "scan2map/stats.hpp"
#include "scan2map/trajectory_io.hpp"
#include "scan2map/voxel_filter.hpp"

namespace scan2map {

/// Reserved substream indices for per-pose randomness. Perturbation trials
/// use stream (seed, fnv1a(pose_id), trial); scan noise uses the reserved
/// slots below so it can never collide with a trial index.
inline constexpr std::uint64_t kScanNoiseStream = 0x8000000000000000ULL;

struct TrialOutcome {
  double translation_error = 0.0;  // meters
  double rotation_error = 0.0;     // radians
  bool converged = false;
  bool degenerate = false;  // registration aborted; errors are those of the init pose
  int iterations = 0;
  int correspondences = 0;
};

struct EvalRecord {
  std::string pose_id;
  IcpVariant variant = IcpVariant::PointToPoint;
  bool failed = false;  // empty submap or degenerate registration on all trials
  double median_translation_error = std::numeric_limits<double>::quiet_NaN();
  double median_rotation_error = std::numeric_limits<double>::quiet_NaN();
  int converged_trials = 0;
  std::vector<TrialOutcome> trials;
};

struct VariantSummary {
  SummaryStats translation;
  SummaryStats rotation;
};

struct BenchmarkReport {
  int schema = 1;
  RunConfig config;
  std::vector<EvalRecord> records;  // trajectory order, PointToPoint then PointToPlane per pose
  VariantSummary point_to_point;
  VariantSummary point_to_plane;
};

inline const char* variant_name(IcpVariant v) {
  return v == IcpVariant::PointToPoint ? "point_to_point" : "point_to_plane";
}

inline IcpVariant variant_from_name(const std::string& name) {
  if (name == "point_to_point") return IcpVariant::PointToPoint;
  if (name == "point_to_plane") return IcpVariant::PointToPlane;
  throw ParseError("unknown ICP variant '" + name + "'");
}

namespace detail {

/// Angle of the relative rotation, via the trace formula. Equals the norm of
/// the SO(3) logarithm wherever the log is defined and extends continuously
/// to pi, so diverged trials still get a reportable error.
inline double relative_rotation_angle(const Pose& a, const Pose& b) {
  return rotation_angle(a.rotation * b.rotation.transpose());
}

inline void fill_medians(EvalRecord& rec) {
  if (rec.trials.empty()) {
    rec.failed = true;
    return;
  }
  std::vector<double> terr, rerr;
  terr.reserve(rec.trials.size());
  rerr.reserve(rec.trials.size());
  bool all_degenerate = true;
  for (const auto& t : rec.trials) {
    terr.push_back(t.translation_error);
    rerr.push_back(t.rotation_error);
    if (t.converged) ++rec.converged_trials;
    if (!t.degenerate) all_degenerate = false;
  }
  rec.median_translation_error = median(terr);
  rec.median_rotation_error = median(rerr);
  rec.failed = all_degenerate;
}

}  // namespace detail

/// Evaluates one trajectory pose: crops the submap, downsamples it, projects
/// the scan at the ground truth pose, applies scan noise, then runs `trials`
/// perturbed registrations per variant. The scan and its noise are drawn once
/// per pose (unless cfg.noise_per_trial); only the initialization varies
/// across trials, and both variants share each trial's initialization.
inline std::pair<EvalRecord, EvalRecord> evaluate_pose(const PointCloud& map, const Pose& gt,
                                                       const std::string& pose_id,
                                                       const RunConfig& cfg) {
  EvalRecord ptp;
  ptp.pose_id = pose_id;
  ptp.variant = IcpVariant::PointToPoint;
  EvalRecord ptpl;
  ptpl.pose_id = pose_id;
  ptpl.variant = IcpVariant::PointToPlane;

  const std::uint64_t pose_hash = fnv1a64(pose_id);
  PointCloud submap = radius_crop(map, gt.translation, cfg.submap_radius);
  if (submap.size() < static_cast<std::size_t>(cfg.icp.normal_k) + 2 ||
      submap.size() < static_cast<std::size_t>(cfg.icp.min_correspondences)) {
    ptp.failed = true;
    ptpl.failed = true;
    return {ptp, ptpl};
  }
  submap = voxel_downsample(submap, cfg.voxel);
  const PointCloud submap_with_normals =
      estimate_normals(submap, static_cast<std::size_t>(cfg.icp.normal_k), gt.translation);
  const SpatialIndex index(submap);

  PointCloud scan = project_scan(submap, gt, cfg.beam);
  if (scan.size() < static_cast<std::size_t>(cfg.icp.min_correspondences)) {
    ptp.failed = true;
    ptpl.failed = true;
    return {ptp, ptpl};
  }
  PointCloud noisy_scan;
  if (!cfg.noise_per_trial) {
    Rng noise_rng(derive_stream_seed(cfg.seed, pose_hash, kScanNoiseStream));
    noisy_scan = add_noise(scan, NoiseSpec{cfg.noise_sigma, 0}, noise_rng);
  }

  PerturbationSpec pspec;
  pspec.sigma = cfg.perturbation_sigma;
  IcpConfig icp_ptp = cfg.icp;
  icp_ptp.variant = IcpVariant::PointToPoint;
  IcpConfig icp_ptpl = cfg.icp;
  icp_ptpl.variant = IcpVariant::PointToPlane;

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const PointCloud* reading = &noisy_scan;
    PointCloud trial_scan;
    if (cfg.noise_per_trial) {
      Rng noise_rng(derive_stream_seed(cfg.seed, pose_hash,
                                       kScanNoiseStream + 1 + static_cast<std::uint64_t>(trial)));
      trial_scan = add_noise(scan, NoiseSpec{cfg.noise_sigma, 0}, noise_rng);
      reading = &trial_scan;
    }
    Rng trial_rng(derive_stream_seed(cfg.seed, pose_hash, static_cast<std::uint64_t>(trial)));
    const Pose init = perturb_pose(gt, pspec, trial_rng);

    for (auto* rec : {&ptp, &ptpl}) {
      const bool plane = rec->variant == IcpVariant::PointToPlane;
      TrialOutcome outcome;
      try {
        const IcpResult res =
            register_clouds(*reading, plane ? submap_with_normals : submap, index, init,
                            plane ? icp_ptpl : icp_ptp);
        outcome.translation_error = translation_error(res.pose, gt);
        outcome.rotation_error = detail::relative_rotation_angle(res.pose, gt);
        outcome.converged = res.converged;
        outcome.iterations = res.iterations;
        outcome.correspondences = res.correspondence_count;
      } catch (const DegenerateGeometryError&) {
        outcome.degenerate = true;
        outcome.translation_error = translation_error(init, gt);
        outcome.rotation_error = detail::relative_rotation_angle(init, gt);
      }
      rec->trials.push_back(outcome);
    }
  }
  detail::fill_medians(ptp);
  detail::fill_medians(ptpl);
  return {ptp, ptpl};
}

namespace detail {

inline void summarize_variant(const std::vector<EvalRecord>& records, IcpVariant variant,
                              VariantSummary& out) {
  std::vector<double> terr, rerr;
  for (const auto& rec : records) {
    if (rec.variant != variant || rec.failed) continue;
    terr.push_back(rec.median_translation_error);
    rerr.push_back(rec.median_rotation_error);
  }
  if (!terr.empty()) {
    out.translation = summarize(terr);
    out.rotation = summarize(rerr);
  }
}

}  // namespace detail

/// Evaluates every trajectory pose, fanning out over `jobs` workers. Records
/// land in fixed slots keyed by pose order, so the report is identical for
/// any job count.
inline BenchmarkReport evaluate_trajectory(const PointCloud& map,
                                           const std::vector<TrajectoryEntry>& trajectory,
                                           const RunConfig& cfg, int jobs = 0) {
  if (trajectory.empty()) {
    throw EmptyInputError("evaluate_trajectory: empty trajectory");
  }
  if (jobs <= 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;
  }
  BenchmarkReport report;
  report.config = cfg;
  report.records.resize(2 * trajectory.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> raised{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= trajectory.size() || raised.load()) return;
      try {
        auto [ptp, ptpl] = evaluate_pose(map, trajectory[i].pose, trajectory[i].pose_id, cfg);
        report.records[2 * i] = std::move(ptp);
        report.records[2 * i + 1] = std::move(ptpl);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!raised.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (raised.load()) std::rethrow_exception(error);

  detail::summarize_variant(report.records, IcpVariant::PointToPoint, report.point_to_point);
  detail::summarize_variant(report.records, IcpVariant::PointToPlane, report.point_to_plane);
  return report;
}

/// Loads the map and trajectory named by the config and evaluates the whole
/// trajectory. Individual pose failures are recorded, never fatal.
inline BenchmarkReport run_benchmark(const RunConfig& cfg, int jobs = 0) {
  const PointCloud map = read_ply(cfg.map_path);
  const auto trajectory = read_trajectory_csv(cfg.trajectory_path);
  return evaluate_trajectory(map, trajectory, cfg, jobs);
}

}  // namespace scan2map
