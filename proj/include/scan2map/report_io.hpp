#pragma once

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scan2map/benchmark.hpp"

namespace scan2map {

/// Report rows, one per (pose, variant).
inline void write_report_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "pose_id,variant,median_trans_m,median_rot_rad,converged_trials,trials\n";
  for (const auto& rec : report.records) {
    out << rec.pose_id << ',' << variant_name(rec.variant) << ','
        << detail::format_double(rec.median_translation_error) << ','
        << detail::format_double(rec.median_rotation_error) << ',' << rec.converged_trials << ','
        << rec.trials.size() << '\n';
  }
}

inline void write_report_csv(const std::string& path, const BenchmarkReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("write_report_csv: cannot open " + path);
  write_report_csv(out, report);
  if (!out) throw IoError("write_report_csv: write failed for " + path);
}

namespace detail {

inline nlohmann::json summary_to_json(const VariantSummary& s) {
  return {{"translation", {{"median", s.translation.median},
                           {"iqr", s.translation.iqr},
                           {"max", s.translation.max}}},
          {"rotation",
           {{"median", s.rotation.median}, {"iqr", s.rotation.iqr}, {"max", s.rotation.max}}}};
}

inline double json_number(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace detail

inline nlohmann::json report_to_json(const BenchmarkReport& report) {
  nlohmann::json j;
  j["schema"] = report.schema;
  j["config"] = run_config_to_json(report.config);
  j["records"] = nlohmann::json::array();
  for (const auto& rec : report.records) {
    nlohmann::json r;
    r["pose_id"] = rec.pose_id;
    r["variant"] = variant_name(rec.variant);
    r["failed"] = rec.failed;
    r["median_translation_error"] = rec.median_translation_error;
    r["median_rotation_error"] = rec.median_rotation_error;
    r["converged_trials"] = rec.converged_trials;
    r["trials"] = nlohmann::json::array();
    for (const auto& t : rec.trials) {
      r["trials"].push_back({{"translation_error", t.translation_error},
                             {"rotation_error", t.rotation_error},
                             {"converged", t.converged},
                             {"degenerate", t.degenerate},
                             {"iterations", t.iterations},
                             {"correspondences", t.correspondences}});
    }
    j["records"].push_back(std::move(r));
  }
  j["summary"] = {{"point_to_point", detail::summary_to_json(report.point_to_point)},
                  {"point_to_plane", detail::summary_to_json(report.point_to_plane)}};
  return j;
}

inline void write_report_json(const std::string& path, const BenchmarkReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("write_report_json: cannot open " + path);
  out << report_to_json(report).dump(2) << '\n';
  if (!out) throw IoError("write_report_json: write failed for " + path);
}

/// Parses a report and re-derives every median from its stored trial errors;
/// mismatches fail the load, so a report on disk is self-consistent.
inline BenchmarkReport load_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_report_json: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_report_json: " + std::string(e.what()));
  }
  BenchmarkReport report;
  try {
    report.schema = j.at("schema").get<int>();
    if (report.schema != 1) {
      throw ParseError("load_report_json: unsupported schema");
    }
    report.config = run_config_from_json(j.at("config"));
    for (const auto& r : j.at("records")) {
      EvalRecord rec;
      rec.pose_id = r.at("pose_id").get<std::string>();
      rec.variant = variant_from_name(r.at("variant").get<std::string>());
      rec.failed = r.at("failed").get<bool>();
      rec.median_translation_error = detail::json_number(r.at("median_translation_error"));
      rec.median_rotation_error = detail::json_number(r.at("median_rotation_error"));
      rec.converged_trials = r.at("converged_trials").get<int>();
      for (const auto& t : r.at("trials")) {
        TrialOutcome outcome;
        outcome.translation_error = t.at("translation_error").get<double>();
        outcome.rotation_error = t.at("rotation_error").get<double>();
        outcome.converged = t.at("converged").get<bool>();
        outcome.degenerate = t.at("degenerate").get<bool>();
        outcome.iterations = t.at("iterations").get<int>();
        outcome.correspondences = t.at("correspondences").get<int>();
        rec.trials.push_back(outcome);
      }
      report.records.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_report_json: " + std::string(e.what()));
  }
  for (const auto& rec : report.records) {
    if (rec.trials.empty()) continue;
    std::vector<double> terr, rerr;
    for (const auto& t : rec.trials) {
      terr.push_back(t.translation_error);
      rerr.push_back(t.rotation_error);
    }
    if (median(terr) != rec.median_translation_error ||
        median(rerr) != rec.median_rotation_error) {
      throw ParseError("load_report_json: stored medians do not match trial errors for pose " +
                       rec.pose_id);
    }
  }
  detail::summarize_variant(report.records, IcpVariant::PointToPoint, report.point_to_point);
  detail::summarize_variant(report.records, IcpVariant::PointToPlane, report.point_to_plane);
  return report;
}

enum class ErrorKind { Translation, Rotation };

/// Minimal SVG line chart of per-pose median error, one polyline per variant.
inline void write_error_svg(const std::string& path, const BenchmarkReport& report,
                            ErrorKind kind) {
  constexpr int kWidth = 900;
  constexpr int kHeight = 300;
  constexpr int kMargin = 40;
  std::vector<double> ptp, ptpl;
  for (const auto& rec : report.records) {
    const double v = kind == ErrorKind::Translation ? rec.median_translation_error
                                                    : rec.median_rotation_error;
    (rec.variant == IcpVariant::PointToPoint ? ptp : ptpl).push_back(v);
  }
  double vmax = 1e-12;
  for (const auto* series : {&ptp, &ptpl}) {
    for (const double v : *series) {
      if (std::isfinite(v) && v > vmax) vmax = v;
    }
  }
  const std::size_t n = std::max<std::size_t>(ptp.size(), 2);
  auto x_of = [&](std::size_t i) {
    return kMargin + (kWidth - 2.0 * kMargin) * static_cast<double>(i) /
                         static_cast<double>(n - 1);
  };
  auto y_of = [&](double v) {
    if (!std::isfinite(v)) v = 0.0;
    return kHeight - kMargin - (kHeight - 2.0 * kMargin) * (v / vmax);
  };
  std::ofstream out(path);
  if (!out) throw IoError("write_error_svg: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const char* label = kind == ErrorKind::Translation ? "median translation error [m]"
                                                     : "median rotation error [rad]";
  out << "<text x=\"" << kMargin << "\" y=\"20\" font-size=\"13\">" << label
      << " (max " << detail::format_double(vmax) << ")</text>\n";
  const char* colors[2] = {"#c0392b", "#2980b9"};
  const char* names[2] = {"point_to_point", "point_to_plane"};
  const std::vector<double>* series[2] = {&ptp, &ptpl};
  for (int s = 0; s < 2; ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[s] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s]->size(); ++i) {
      out << detail::format_double(x_of(i)) << ',' << detail::format_double(y_of((*series[s])[i]))
          << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << kWidth - kMargin - 160 << "\" y=\"" << 20 + 16 * s
        << "\" font-size=\"12\" fill=\"" << colors[s] << "\">" << names[s] << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write_error_svg: write failed for " + path);
}

}  // namespace scan2map
