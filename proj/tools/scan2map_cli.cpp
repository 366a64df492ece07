// Command-line surface for the scan-to-map relocalization toolkit: synthetic
// scene generation, scan projection, pose perturbation, ICP registration,
// change quantification, and the full evaluation harness.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scan2map/scan2map.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t env_seed_or(std::uint64_t fallback) {
  const char* env = std::getenv("SCAN2MAP_SEED");
  if (env == nullptr) return fallback;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw scan2map::ParseError("SCAN2MAP_SEED is not a valid unsigned integer");
  }
}

scan2map::Pose parse_pose_row(const std::string& text) {
  const auto fields = scan2map::detail::split_csv(text);
  if (fields.size() != 7) {
    throw scan2map::ParseError("pose must be 7 comma-separated values tx,ty,tz,qx,qy,qz,qw");
  }
  std::array<double, 7> row;
  for (int i = 0; i < 7; ++i) row[i] = scan2map::detail::parse_double(fields[i], "pose");
  return scan2map::pose_from_quaternion_row(row);
}

json pose_to_json(const scan2map::Pose& p) {
  const auto row = scan2map::pose_to_quaternion_row(p);
  return {{"translation", {row[0], row[1], row[2]}},
          {"quaternion", {row[3], row[4], row[5], row[6]}}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw scan2map::IoError("cannot open " + path.string());
  out << text;
  if (!out) throw scan2map::IoError("write failed for " + path.string());
}

struct SynthArgs {
  std::string kind = "clutter";
  double extent = 40.0;
  double density = 50.0;
  std::optional<std::uint64_t> seed;
  std::string output_dir = ".";
};

int run_synth(const SynthArgs& args) {
  scan2map::SceneSpec spec;
  spec.kind = scan2map::scene_kind_from_name(args.kind);
  spec.extent = args.extent;
  spec.density = args.density;
  spec.seed = args.seed ? *args.seed : env_seed_or(0);
  fs::create_directories(args.output_dir);
  json manifest = {{"kind", args.kind},
                   {"extent", spec.extent},
                   {"density", spec.density},
                   {"seed", spec.seed}};
  if (spec.kind == scan2map::SceneKind::ObjectChange) {
    const auto [reference, session] = scan2map::generate_pair(spec);
    scan2map::write_ply((fs::path(args.output_dir) / "reference.ply").string(), reference);
    scan2map::write_ply((fs::path(args.output_dir) / "session.ply").string(), session);
    manifest["reference_points"] = reference.size();
    manifest["session_points"] = session.size();
    manifest["added_points"] = session.size() - reference.size();
  } else {
    const auto cloud = scan2map::generate(spec);
    scan2map::write_ply((fs::path(args.output_dir) / (args.kind + ".ply")).string(), cloud);
    manifest["points"] = cloud.size();
  }
  write_text(fs::path(args.output_dir) / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

struct ProjectArgs {
  std::string map_path;
  std::string pose_text;
  std::string trajectory_path;
  std::string pose_id;
  std::vector<std::string> overrides;
  std::string output = "scan.ply";
};

int run_project(const ProjectArgs& args) {
  scan2map::Pose pose;
  if (!args.pose_text.empty()) {
    pose = parse_pose_row(args.pose_text);
  } else if (!args.trajectory_path.empty()) {
    const auto trajectory = scan2map::read_trajectory_csv(args.trajectory_path);
    const auto it = std::find_if(trajectory.begin(), trajectory.end(),
                                 [&](const auto& e) { return e.pose_id == args.pose_id; });
    if (it == trajectory.end()) {
      throw scan2map::ParseError("pose id '" + args.pose_id + "' not found in trajectory");
    }
    pose = it->pose;
  } else {
    throw scan2map::ParseError("project needs --pose or --trajectory with --pose-id");
  }
  json beam_json = scan2map::beam_model_to_json(scan2map::default_beam_model());
  json wrapper = {{"beam", beam_json}};
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw scan2map::ParseError("override must be key=value");
    scan2map::apply_config_override(wrapper, kv.substr(0, eq), kv.substr(eq + 1));
  }
  scan2map::RunConfig beam_cfg;  // reuse the strict beam parser
  json cfg_json = {{"beam", wrapper["beam"]}};
  beam_cfg = scan2map::run_config_from_json(cfg_json);
  const auto map = scan2map::read_ply(args.map_path);
  const auto scan = scan2map::project_scan(map, pose, beam_cfg.beam);
  scan2map::write_ply(args.output, scan);
  std::cout << scan.size() << " points -> " << args.output << "\n";
  return 0;
}

struct PerturbArgs {
  std::string pose_text;
  std::string trajectory_path;
  std::vector<double> sigma;
  int count = 1;
  std::optional<std::uint64_t> seed;
  std::string output;
};

int run_perturb(const PerturbArgs& args) {
  scan2map::PerturbationSpec spec;
  if (!args.sigma.empty()) {
    if (args.sigma.size() != 6) throw scan2map::ParseError("--sigma needs 6 values");
    for (int i = 0; i < 6; ++i) spec.sigma[i] = args.sigma[static_cast<std::size_t>(i)];
  }
  spec.seed = args.seed ? *args.seed : env_seed_or(0);
  std::vector<scan2map::TrajectoryEntry> input;
  if (!args.pose_text.empty()) {
    input.push_back({"pose", parse_pose_row(args.pose_text)});
  } else if (!args.trajectory_path.empty()) {
    input = scan2map::read_trajectory_csv(args.trajectory_path);
  } else {
    throw scan2map::ParseError("perturb needs --pose or --trajectory");
  }
  std::vector<scan2map::TrajectoryEntry> output;
  for (const auto& entry : input) {
    for (int t = 0; t < args.count; ++t) {
      scan2map::Rng rng(scan2map::derive_stream_seed(
          spec.seed, scan2map::fnv1a64(entry.pose_id), static_cast<std::uint64_t>(t)));
      output.push_back({entry.pose_id + "/" + std::to_string(t),
                        scan2map::perturb_pose(entry.pose, spec, rng)});
    }
  }
  if (args.output.empty()) {
    std::cout << scan2map::kTrajectoryHeader << '\n';
    for (const auto& e : output) {
      const auto row = scan2map::pose_to_quaternion_row(e.pose);
      std::cout << e.pose_id;
      for (const double v : row) std::cout << ',' << scan2map::detail::format_double(v);
      std::cout << '\n';
    }
  } else {
    scan2map::write_trajectory_csv(args.output, output);
  }
  return 0;
}

struct RegisterArgs {
  std::string scan_path;
  std::string map_path;
  std::string init_text;
  std::string variant = "point_to_point";
  std::vector<std::string> overrides;
  std::string output;
};

int run_register(const RegisterArgs& args) {
  json wrapper = {{"icp", scan2map::icp_config_to_json(scan2map::IcpConfig{})}};
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw scan2map::ParseError("override must be key=value");
    scan2map::apply_config_override(wrapper, kv.substr(0, eq), kv.substr(eq + 1));
  }
  const scan2map::RunConfig parsed = scan2map::run_config_from_json(json{{"icp", wrapper["icp"]}});
  scan2map::IcpConfig cfg = parsed.icp;
  cfg.variant = scan2map::variant_from_name(args.variant);
  const auto reading = scan2map::read_ply(args.scan_path);
  const auto reference = scan2map::read_ply(args.map_path);
  const scan2map::SpatialIndex index(reference);
  const scan2map::Pose init =
      args.init_text.empty() ? scan2map::Pose::Identity() : parse_pose_row(args.init_text);
  const auto result = scan2map::register_clouds(reading, reference, index, init, cfg);
  json out = {{"pose", pose_to_json(result.pose)},
              {"iterations", result.iterations},
              {"converged", result.converged},
              {"final_rms_residual", result.final_rms_residual},
              {"correspondence_count", result.correspondence_count},
              {"variant", args.variant}};
  if (args.output.empty()) {
    std::cout << out.dump(2) << '\n';
  } else {
    write_text(args.output, out.dump(2) + "\n");
  }
  return 0;
}

struct ChangeArgs {
  std::string session_path;
  std::string reference_path;
  std::string trajectory_path;
  double threshold = 0.3;
  double radius = 35.0;
  double voxel = 0.1;
  std::string output_dir;
};

int run_change(const ChangeArgs& args) {
  scan2map::PointCloud session = scan2map::read_ply(args.session_path);
  scan2map::PointCloud reference = scan2map::read_ply(args.reference_path);
  // Change metrics run on lightly downsampled clouds; --voxel 0 keeps full
  // density.
  if (args.voxel > 0.0) {
    session = scan2map::voxel_downsample(session, args.voxel);
    reference = scan2map::voxel_downsample(reference, args.voxel);
  }
  const auto trajectory = scan2map::read_trajectory_csv(args.trajectory_path);
  const scan2map::SpatialIndex index(reference);
  const auto report = scan2map::compute_change_report(session, reference, index, trajectory,
                                                      args.radius, args.threshold);
  const json j = scan2map::change_report_to_json(report);
  if (args.output_dir.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    fs::create_directories(args.output_dir);
    write_text(fs::path(args.output_dir) / "change.json", j.dump(2) + "\n");
    std::ofstream csv(fs::path(args.output_dir) / "change.csv");
    if (!csv) throw scan2map::IoError("cannot open change.csv in " + args.output_dir);
    scan2map::write_change_csv(csv, report);
  }
  return 0;
}

struct EvaluateArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  bool plots = false;
  std::vector<std::string> overrides;
  std::string output_dir = ".";
};

int run_evaluate(const EvaluateArgs& args) {
  json cfg_json = json::object();
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw scan2map::IoError("cannot open config " + args.config_path);
    try {
      in >> cfg_json;
    } catch (const json::exception& e) {
      throw scan2map::ParseError("config " + args.config_path + ": " + e.what());
    }
  }
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw scan2map::ParseError("override must be key=value");
    scan2map::apply_config_override(cfg_json, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!cfg_json.contains("seed")) {
    cfg_json["seed"] = env_seed_or(0);
  }
  if (args.seed) cfg_json["seed"] = *args.seed;
  scan2map::RunConfig cfg = scan2map::run_config_from_json(cfg_json);
  if (cfg.map_path.empty() || cfg.trajectory_path.empty()) {
    throw scan2map::ParseError("config needs map_path and trajectory_path");
  }

  const auto report = scan2map::run_benchmark(cfg, args.jobs);
  fs::create_directories(args.output_dir);
  scan2map::write_report_csv((fs::path(args.output_dir) / "report.csv").string(), report);
  scan2map::write_report_json((fs::path(args.output_dir) / "report.json").string(), report);
  if (args.plots) {
    scan2map::write_error_svg((fs::path(args.output_dir) / "translation_error.svg").string(),
                              report, scan2map::ErrorKind::Translation);
    scan2map::write_error_svg((fs::path(args.output_dir) / "rotation_error.svg").string(), report,
                              scan2map::ErrorKind::Rotation);
  }
  const auto print_summary = [](const char* name, const scan2map::VariantSummary& s) {
    std::cout << name << " translation median/iqr/max [m]: "
              << scan2map::detail::format_double(s.translation.median) << ' '
              << scan2map::detail::format_double(s.translation.iqr) << ' '
              << scan2map::detail::format_double(s.translation.max) << '\n';
    std::cout << name << " rotation median/iqr/max [rad]: "
              << scan2map::detail::format_double(s.rotation.median) << ' '
              << scan2map::detail::format_double(s.rotation.iqr) << ' '
              << scan2map::detail::format_double(s.rotation.max) << '\n';
  };
  print_summary("point_to_point", report.point_to_point);
  print_summary("point_to_plane", report.point_to_plane);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scan-to-map relocalization robustness toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic scene as PLY + manifest");
  synth_cmd
      ->add_option("--kind", synth.kind,
                   "corridor|flat_ground|wall_only|clutter|forest_corridor|object_change")
      ->capture_default_str();
  synth_cmd->add_option("--extent", synth.extent, "scene extent [m]")->capture_default_str();
  synth_cmd->add_option("--density", synth.density, "surface density [points/m^2]")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("-o,--output-dir", synth.output_dir, "output directory")
      ->capture_default_str();

  ProjectArgs project;
  auto* project_cmd = app.add_subcommand("project", "project an occlusion-aware scan from a map");
  project_cmd->add_option("--map", project.map_path, "map PLY")->required();
  project_cmd->add_option("--pose", project.pose_text, "sensor pose tx,ty,tz,qx,qy,qz,qw");
  project_cmd->add_option("--trajectory", project.trajectory_path, "trajectory CSV");
  project_cmd->add_option("--pose-id", project.pose_id, "pose id within --trajectory");
  project_cmd->add_option("--set", project.overrides, "beam override, e.g. beam.channels=64");
  project_cmd->add_option("-o,--output", project.output, "output scan PLY")
      ->capture_default_str();

  PerturbArgs perturb;
  auto* perturb_cmd = app.add_subcommand("perturb", "sample perturbed poses to CSV");
  perturb_cmd->add_option("--pose", perturb.pose_text, "pose tx,ty,tz,qx,qy,qz,qw");
  perturb_cmd->add_option("--trajectory", perturb.trajectory_path, "trajectory CSV");
  perturb_cmd->add_option("--sigma", perturb.sigma,
                          "six per-axis sigmas: m,m,m,rad,rad,rad")
      ->delimiter(',');
  perturb_cmd->add_option("--count", perturb.count, "perturbations per pose")
      ->capture_default_str();
  perturb_cmd->add_option("--seed", perturb.seed, "sampling seed");
  perturb_cmd->add_option("-o,--output", perturb.output, "output CSV (default stdout)");

  RegisterArgs reg;
  auto* register_cmd = app.add_subcommand("register", "register a scan against a map with ICP");
  register_cmd->add_option("--scan", reg.scan_path, "reading PLY")->required();
  register_cmd->add_option("--map", reg.map_path, "reference PLY")->required();
  register_cmd->add_option("--init", reg.init_text, "initial pose (default identity)");
  register_cmd->add_option("--variant", reg.variant, "point_to_point|point_to_plane")
      ->capture_default_str();
  register_cmd->add_option("--set", reg.overrides, "icp override, e.g. icp.max_iterations=50");
  register_cmd->add_option("-o,--output", reg.output, "result JSON (default stdout)");

  ChangeArgs change;
  auto* change_cmd = app.add_subcommand("change", "quantify change between two sessions");
  change_cmd->add_option("--session", change.session_path, "session PLY")->required();
  change_cmd->add_option("--reference", change.reference_path, "reference PLY")->required();
  change_cmd->add_option("--trajectory", change.trajectory_path, "trajectory CSV")->required();
  change_cmd->add_option("--threshold", change.threshold, "change distance threshold [m]")
      ->capture_default_str();
  change_cmd->add_option("--radius", change.radius, "per-pose window radius [m]")
      ->capture_default_str();
  change_cmd->add_option("--voxel", change.voxel, "pre-filter voxel size [m], 0 disables")
      ->capture_default_str();
  change_cmd->add_option("-o,--output-dir", change.output_dir,
                         "write change.csv + change.json here (default stdout JSON)");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "run the full relocalization benchmark");
  evaluate_cmd->add_option("--config", evaluate.config_path, "run config JSON");
  evaluate_cmd->add_option("--seed", evaluate.seed, "override the run seed");
  evaluate_cmd->add_option("--jobs", evaluate.jobs, "worker count (default: machine parallelism)");
  evaluate_cmd->add_flag("--plots", evaluate.plots, "also write SVG error-vs-pose plots");
  evaluate_cmd->add_option("--set", evaluate.overrides,
                           "config override, e.g. icp.max_iterations=150");
  evaluate_cmd->add_option("-o,--output-dir", evaluate.output_dir, "report directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (project_cmd->parsed()) return run_project(project);
    if (perturb_cmd->parsed()) return run_perturb(perturb);
    if (register_cmd->parsed()) return run_register(reg);
    if (change_cmd->parsed()) return run_change(change);
    if (evaluate_cmd->parsed()) return run_evaluate(evaluate);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
