#pragma once

#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "shellpinn/errors.hpp"

namespace shellpinn {

/// Summary of one solve or topology optimization run.
struct Report {
  std::string benchmark;
  std::string mode;  // "solve" or "topopt"
  std::vector<double> loss_history;
  std::vector<double> error_history;
  /// Relative L2 error per field and their average ("average").
  std::map<std::string, double> l2_errors;
  /// Point values such as the Scordelis-Lo free-edge midpoint deflection.
  std::map<std::string, double> probes;
  /// Per-outer-iteration trajectories of a topology optimization.
  std::map<std::string, std::vector<double>> series;
  /// Recorded multiplier updates: iteration, index, lambda_old, mu, h, lambda_new.
  std::vector<std::array<double, 6>> multipliers;
  bool converged = false;
  int line_search_failures = 0;
  double wall_seconds = 0.0;
  std::map<std::string, std::string> config;

  bool operator==(const Report&) const = default;
};

inline void to_json(nlohmann::json& j, const Report& r) {
  j = nlohmann::json{{"benchmark", r.benchmark},
                     {"mode", r.mode},
                     {"loss_history", r.loss_history},
                     {"error_history", r.error_history},
                     {"l2_errors", r.l2_errors},
                     {"probes", r.probes},
                     {"series", r.series},
                     {"multipliers", r.multipliers},
                     {"converged", r.converged},
                     {"line_search_failures", r.line_search_failures},
                     {"wall_seconds", r.wall_seconds},
                     {"config", r.config}};
}

inline void from_json(const nlohmann::json& j, Report& r) {
  j.at("benchmark").get_to(r.benchmark);
  j.at("mode").get_to(r.mode);
  j.at("loss_history").get_to(r.loss_history);
  j.at("error_history").get_to(r.error_history);
  j.at("l2_errors").get_to(r.l2_errors);
  j.at("probes").get_to(r.probes);
  j.at("series").get_to(r.series);
  j.at("multipliers").get_to(r.multipliers);
  j.at("converged").get_to(r.converged);
  j.at("line_search_failures").get_to(r.line_search_failures);
  j.at("wall_seconds").get_to(r.wall_seconds);
  j.at("config").get_to(r.config);
}

inline std::string report_to_string(const Report& r) { return nlohmann::json(r).dump(2); }

inline Report report_from_string(const std::string& s) {
  try {
    return nlohmann::json::parse(s).get<Report>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("report: ") + e.what());
  }
}

inline void save_report(const std::string& path, const Report& r) {
  std::ofstream os(path);
  if (!os) throw Error("io", "cannot open '" + path + "' for writing");
  os << report_to_string(r) << '\n';
  if (!os) throw Error("io", "failed writing '" + path + "'");
}

inline Report load_report(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("io", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return report_from_string(ss.str());
}

}  // namespace shellpinn
