#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "scan2map/errors.hpp"
#include "scan2map/icp.hpp"
#include "scan2map/scan_projection.hpp"
#include "scan2map/se3.hpp"

namespace scan2map {

/// Benchmark run description. Defaults reproduce the evaluation protocol the
/// library is built around: 35 m submaps, 0.1 m voxel, 32-beam projected
/// scans, sigma 0.1 m scan noise, left-composed pose perturbations of
/// (0.1 m, 0.09 rad) per axis, both ICP variants, 30 trials per pose.
struct RunConfig {
  std::string map_path;
  std::string trajectory_path;
  double submap_radius = 35.0;  // meters
  double voxel = 0.1;           // meters
  BeamModel beam = default_beam_model();
  double noise_sigma = 0.1;  // meters
  Vector6d perturbation_sigma = (Vector6d() << 0.1, 0.1, 0.1, 0.09, 0.09, 0.09).finished();
  IcpConfig icp;  // shared tuning; the harness runs both variants
  int trials = 30;
  std::uint64_t seed = 0;
  // Alternate protocol reading: draw fresh scan noise for every trial instead
  // of once per pose.
  bool noise_per_trial = false;

  bool is_valid() const {
    return submap_radius > 0.0 && voxel > 0.0 && beam.is_valid() && noise_sigma >= 0.0 &&
           (perturbation_sigma.array() >= 0.0).all() && icp.is_valid() && trials >= 1;
  }
};

inline nlohmann::json beam_model_to_json(const BeamModel& m) {
  return {{"channels", m.channels},
          {"azimuth_steps", m.azimuth_steps},
          {"elevation_min", m.elevation_min},
          {"elevation_max", m.elevation_max},
          {"max_range", m.max_range},
          {"max_height", m.max_height},
          {"angular_tolerance", m.angular_tolerance}};
}

inline nlohmann::json icp_config_to_json(const IcpConfig& c) {
  return {{"max_correspondence", c.max_correspondence},
          {"max_iterations", c.max_iterations},
          {"cauchy_scale", c.cauchy_scale},
          {"translation_epsilon", c.translation_epsilon},
          {"rotation_epsilon", c.rotation_epsilon},
          {"min_correspondences", c.min_correspondences},
          {"normal_k", c.normal_k}};
}

inline nlohmann::json run_config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["map_path"] = cfg.map_path;
  j["trajectory_path"] = cfg.trajectory_path;
  j["submap_radius"] = cfg.submap_radius;
  j["voxel"] = cfg.voxel;
  j["beam"] = beam_model_to_json(cfg.beam);
  j["noise"] = {{"sigma", cfg.noise_sigma}};
  j["perturbation"] = {{"sigma", std::vector<double>(cfg.perturbation_sigma.data(),
                                                     cfg.perturbation_sigma.data() + 6)}};
  j["icp"] = icp_config_to_json(cfg.icp);
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["noise_per_trial"] = cfg.noise_per_trial;
  return j;
}

namespace detail {

template <typename T>
void take(nlohmann::json& obj, const char* key, T& into, const std::string& context) {
  if (auto it = obj.find(key); it != obj.end()) {
    try {
      into = it->get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("config: bad value for " + context + "." + key + ": " + e.what());
    }
    obj.erase(it);
  }
}

inline void reject_unknown(const nlohmann::json& obj, const std::string& context) {
  if (!obj.empty()) {
    throw ParseError("config: unknown key '" + context + "." + obj.begin().key() + "'");
  }
}

}  // namespace detail

/// Parses a config object. Missing keys keep their defaults; unknown keys are
/// rejected so misspelled overrides fail before any work starts.
inline RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ParseError("config: expected a JSON object");
  }
  RunConfig cfg;
  nlohmann::json rest = j;
  detail::take(rest, "map_path", cfg.map_path, "config");
  detail::take(rest, "trajectory_path", cfg.trajectory_path, "config");
  detail::take(rest, "submap_radius", cfg.submap_radius, "config");
  detail::take(rest, "voxel", cfg.voxel, "config");
  if (auto it = rest.find("beam"); it != rest.end()) {
    nlohmann::json b = *it;
    detail::take(b, "channels", cfg.beam.channels, "beam");
    detail::take(b, "azimuth_steps", cfg.beam.azimuth_steps, "beam");
    detail::take(b, "elevation_min", cfg.beam.elevation_min, "beam");
    detail::take(b, "elevation_max", cfg.beam.elevation_max, "beam");
    detail::take(b, "max_range", cfg.beam.max_range, "beam");
    detail::take(b, "max_height", cfg.beam.max_height, "beam");
    detail::take(b, "angular_tolerance", cfg.beam.angular_tolerance, "beam");
    detail::reject_unknown(b, "beam");
    rest.erase(it);
  }
  if (auto it = rest.find("noise"); it != rest.end()) {
    nlohmann::json n = *it;
    detail::take(n, "sigma", cfg.noise_sigma, "noise");
    detail::reject_unknown(n, "noise");
    rest.erase(it);
  }
  if (auto it = rest.find("perturbation"); it != rest.end()) {
    nlohmann::json p = *it;
    std::vector<double> sigma(cfg.perturbation_sigma.data(), cfg.perturbation_sigma.data() + 6);
    detail::take(p, "sigma", sigma, "perturbation");
    if (sigma.size() != 6) {
      throw ParseError("config: perturbation.sigma must have 6 entries");
    }
    for (int i = 0; i < 6; ++i) cfg.perturbation_sigma[i] = sigma[i];
    detail::reject_unknown(p, "perturbation");
    rest.erase(it);
  }
  if (auto it = rest.find("icp"); it != rest.end()) {
    nlohmann::json c = *it;
    detail::take(c, "max_correspondence", cfg.icp.max_correspondence, "icp");
    detail::take(c, "max_iterations", cfg.icp.max_iterations, "icp");
    detail::take(c, "cauchy_scale", cfg.icp.cauchy_scale, "icp");
    detail::take(c, "translation_epsilon", cfg.icp.translation_epsilon, "icp");
    detail::take(c, "rotation_epsilon", cfg.icp.rotation_epsilon, "icp");
    detail::take(c, "min_correspondences", cfg.icp.min_correspondences, "icp");
    detail::take(c, "normal_k", cfg.icp.normal_k, "icp");
    detail::reject_unknown(c, "icp");
    rest.erase(it);
  }
  detail::take(rest, "trials", cfg.trials, "config");
  detail::take(rest, "seed", cfg.seed, "config");
  detail::take(rest, "noise_per_trial", cfg.noise_per_trial, "config");
  detail::reject_unknown(rest, "config");
  if (!cfg.is_valid()) {
    throw ParseError("config: values out of range");
  }
  return cfg;
}

/// Applies a dotted-key override such as icp.max_iterations=100 onto a config
/// JSON object. The value is parsed as a JSON literal when possible,
/// otherwise taken as a string.
inline void apply_config_override(nlohmann::json& config, const std::string& key,
                                  const std::string& value) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(value);
  } catch (const nlohmann::json::exception&) {
    parsed = value;
  }
  nlohmann::json* node = &config;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) {
      throw ParseError("override: empty key segment in '" + key + "'");
    }
    if (dot == std::string::npos) {
      (*node)[part] = parsed;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace scan2map
