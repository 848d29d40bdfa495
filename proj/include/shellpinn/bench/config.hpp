#pragma once

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "shellpinn/errors.hpp"
#include "shellpinn/io/fields_io.hpp"
#include "shellpinn/network/mlp.hpp"
#include "shellpinn/sampling/sampling.hpp"
#include "shellpinn/training/loss.hpp"
#include "shellpinn/training/problem.hpp"
#include "shellpinn/training/train.hpp"

namespace shellpinn {

/// Every setting of a solve or topology optimization run. A config file sets
/// `benchmark` to a preset id and may override any other key.
struct RunConfig {
  std::string benchmark = "custom";

  ChartKind chart = ChartKind::flat_plate;
  double length = 1.0, width = 1.0, height = 1.0, radius = 0.5;
  double half_angle = 2.0 * std::numbers::pi / 9.0;

  double E = 1.0, nu = 0.3, kappa = 5.0 / 6.0, t = 0.1;
  double load_x = 0.0, load_y = 0.0, load_z = -1.0;
  int load_thickness_power = 0;
  double load_kernel_width = 0.0;

  /// Trial multiplier for all outputs, optionally overridden per output.
  std::string trial = "1";
  std::array<std::string, 5> trial_output{};
  RotationBasis rotation_basis = RotationBasis::covariant;
  std::vector<Edge> neumann_edges, dirichlet_edges;

  std::size_t n_collocation = 2048, n_boundary_neumann = 0, n_boundary_dirichlet = 0;
  Sampler sampler = Sampler::sobol;
  std::uint64_t seed = 0;
  bool resample_every_epoch = false;

  int hidden_layers = 3, width_neurons = 50;
  Activation activation = Activation::gelu;
  std::uint64_t init_seed = 0;

  LossKind loss = LossKind::weak;
  int epochs = 100;
  OptimizerKind optimizer = OptimizerKind::lbfgs;
  double lr = 1e-3;  // Adam only
  double lambda_bc = 1.0;
  /// Train on loss / t^load_thickness_power so the optimizer's absolute
  /// tolerances see an O(1) loss for thin shells.
  bool normalize_loss = false;
  int eval_grid = 101;

  /// Presentation only: displacement magnification for plots.
  double display_scale = 1.0;
  /// Un-scaling of the free-edge midpoint deflection to the original
  /// Scordelis-Lo units: geometric_factor * (orig_load / orig_E) / t^2.
  double orig_E = 4.32e8, orig_load = 90.0, geometric_factor = 50.0;

  std::string reference, fields_out, report_out, thickness_out;

  double t_init = 0.1, volume_fraction = 0.8, V0 = 0.0;  // V0 = 0: volume_fraction * t_init * area
  double t_min = 0.02, t_max = 0.2;
  double mu_init = 1.0, constraint_tol = 1e-2, volume_tol = 1e-3;
  int outer_iters = 20, inner_epochs = 20, warmup_epochs = 50;
  int thickness_hidden_layers = 2, thickness_width = 20;

  Problem problem() const;
  void validate() const;
  double loss_scale() const { return normalize_loss ? std::pow(t, -load_thickness_power) : 1.0; }
};

namespace detail {

template <class T>
T parse_number(const std::string& key, const std::string& s) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError(key, "expected a number, got '" + s + "'");
  }
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + s + "'");
}

inline std::vector<Edge> parse_edges(const std::string& key, const std::string& s) {
  std::vector<Edge> out;
  if (s.empty() || s == "none") return out;
  for (auto part : split_csv(s)) {
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    try {
      out.push_back(edge_from_string(part));
    } catch (const ConfigError& e) {
      throw ConfigError(key, e.what());
    }
  }
  return out;
}

inline std::string edges_str(const std::vector<Edge>& e) {
  if (e.empty()) return "none";
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::string(to_string(e[i]));
  return s;
}

/// Rethrows a parse error of an enum-like value under the config key.
template <class F>
auto keyed(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(key, e.what());
  }
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

inline const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> f;
    auto num = [&f](const std::string& key, auto RunConfig::*m) {
      using T = std::remove_reference_t<decltype(RunConfig{}.*m)>;
      f[key] = {[key, m](RunConfig& c, const std::string& s) { c.*m = parse_number<T>(key, s); },
                [m](const RunConfig& c) {
                  if constexpr (std::is_floating_point_v<T>) return format_double(c.*m);
                  else return std::to_string(c.*m);
                }};
    };
    auto str = [&f](const std::string& key, std::string RunConfig::*m) {
      f[key] = {[m](RunConfig& c, const std::string& s) { c.*m = s; }, [m](const RunConfig& c) { return c.*m; }};
    };
    num("length", &RunConfig::length);
    num("width", &RunConfig::width);
    num("height", &RunConfig::height);
    num("radius", &RunConfig::radius);
    num("half_angle", &RunConfig::half_angle);
    num("E", &RunConfig::E);
    num("nu", &RunConfig::nu);
    num("kappa", &RunConfig::kappa);
    num("t", &RunConfig::t);
    num("load_x", &RunConfig::load_x);
    num("load_y", &RunConfig::load_y);
    num("load_z", &RunConfig::load_z);
    num("load_thickness_power", &RunConfig::load_thickness_power);
    num("load_kernel_width", &RunConfig::load_kernel_width);
    num("n_collocation", &RunConfig::n_collocation);
    num("n_boundary_neumann", &RunConfig::n_boundary_neumann);
    num("n_boundary_dirichlet", &RunConfig::n_boundary_dirichlet);
    num("seed", &RunConfig::seed);
    num("hidden_layers", &RunConfig::hidden_layers);
    num("neurons", &RunConfig::width_neurons);
    num("init_seed", &RunConfig::init_seed);
    num("epochs", &RunConfig::epochs);
    num("lr", &RunConfig::lr);
    num("lambda_bc", &RunConfig::lambda_bc);
    num("eval_grid", &RunConfig::eval_grid);
    num("display_scale", &RunConfig::display_scale);
    num("orig_E", &RunConfig::orig_E);
    num("orig_load", &RunConfig::orig_load);
    num("geometric_factor", &RunConfig::geometric_factor);
    num("t_init", &RunConfig::t_init);
    num("volume_fraction", &RunConfig::volume_fraction);
    num("V0", &RunConfig::V0);
    num("t_min", &RunConfig::t_min);
    num("t_max", &RunConfig::t_max);
    num("mu_init", &RunConfig::mu_init);
    num("constraint_tol", &RunConfig::constraint_tol);
    num("volume_tol", &RunConfig::volume_tol);
    num("outer_iters", &RunConfig::outer_iters);
    num("inner_epochs", &RunConfig::inner_epochs);
    num("warmup_epochs", &RunConfig::warmup_epochs);
    num("thickness_hidden_layers", &RunConfig::thickness_hidden_layers);
    num("thickness_neurons", &RunConfig::thickness_width);
    str("benchmark", &RunConfig::benchmark);
    str("trial", &RunConfig::trial);
    str("reference", &RunConfig::reference);
    str("fields_out", &RunConfig::fields_out);
    str("report_out", &RunConfig::report_out);
    str("thickness_out", &RunConfig::thickness_out);
    for (int i = 0; i < 5; ++i) {
      f[std::string("trial_") + kFieldNames[i]] = {
          [i](RunConfig& c, const std::string& s) { c.trial_output[i] = s; },
          [i](const RunConfig& c) { return c.trial_output[i]; }};
    }
    f["chart"] = {[](RunConfig& c, const std::string& s) { c.chart = chart_kind_from_string(s); },
                  [](const RunConfig& c) { return std::string(to_string(c.chart)); }};
    f["rotation_basis"] = {[](RunConfig& c, const std::string& s) { c.rotation_basis = rotation_basis_from_string(s); },
                           [](const RunConfig& c) { return std::string(to_string(c.rotation_basis)); }};
    f["neumann_edges"] = {[](RunConfig& c, const std::string& s) { c.neumann_edges = parse_edges("neumann_edges", s); },
                          [](const RunConfig& c) { return edges_str(c.neumann_edges); }};
    f["dirichlet_edges"] = {
        [](RunConfig& c, const std::string& s) { c.dirichlet_edges = parse_edges("dirichlet_edges", s); },
        [](const RunConfig& c) { return edges_str(c.dirichlet_edges); }};
    f["sampler"] = {[](RunConfig& c, const std::string& s) { c.sampler = sampler_from_string(s); },
                    [](const RunConfig& c) { return std::string(to_string(c.sampler)); }};
    f["resample_every_epoch"] = {
        [](RunConfig& c, const std::string& s) { c.resample_every_epoch = parse_bool("resample_every_epoch", s); },
        [](const RunConfig& c) { return std::string(c.resample_every_epoch ? "true" : "false"); }};
    f["normalize_loss"] = {
        [](RunConfig& c, const std::string& s) { c.normalize_loss = parse_bool("normalize_loss", s); },
        [](const RunConfig& c) { return std::string(c.normalize_loss ? "true" : "false"); }};
    f["activation"] = {[](RunConfig& c, const std::string& s) { c.activation = activation_from_string(s); },
                       [](const RunConfig& c) { return std::string(to_string(c.activation)); }};
    f["loss"] = {[](RunConfig& c, const std::string& s) { c.loss = loss_kind_from_string(s); },
                 [](const RunConfig& c) { return std::string(to_string(c.loss)); }};
    f["optimizer"] = {[](RunConfig& c, const std::string& s) { c.optimizer = optimizer_from_string(s); },
                      [](const RunConfig& c) { return std::string(to_string(c.optimizer)); }};
    return f;
  }();
  return table;
}

}  // namespace detail

/// Names of all benchmark presets, full and desk-scale.
inline std::vector<std::string> preset_names() {
  return {"hyperb_parab_partial", "hyperb_parab_partial_desk", "hyperb_parab_clamped", "hyperb_parab_clamped_desk",
          "scordelis_lo",         "scordelis_lo_desk",         "hemisphere",           "hemisphere_desk",
          "flat_plate_patch",     "topopt_plate",              "topopt_plate_desk"};
}

/// Preset configuration by id; throws ConfigError("benchmark") for unknown ids.
inline RunConfig preset(const std::string& id) {
  RunConfig c;
  c.benchmark = id;
  const bool desk = id.size() > 5 && id.ends_with("_desk");
  const std::string base = desk ? id.substr(0, id.size() - 5) : id;
  if (base == "hyperb_parab_partial" || base == "hyperb_parab_clamped") {
    c.chart = ChartKind::hyperbolic_paraboloid;
    c.length = c.width = 1.0;
    c.height = 1.0;
    c.nu = 0.3;
    c.t = 0.1;
    c.load_thickness_power = 1;
    c.epochs = 100;
    c.display_scale = 0.005;
    if (base == "hyperb_parab_partial") {
      c.trial = "xi1_min";
      c.neumann_edges = {Edge::xi1_max, Edge::xi2_min, Edge::xi2_max};
      c.n_boundary_neumann = 512;
      c.n_collocation = desk ? 2048 : 16384;
    } else {
      c.trial = "xi1_min*xi1_max*xi2_min*xi2_max";
      c.n_collocation = 2048;
      if (desk) c.epochs = 50;
    }
  } else if (base == "scordelis_lo") {
    c.chart = ChartKind::scordelis_lo;
    c.length = 1.0;
    c.radius = 0.5;
    c.half_angle = 2.0 * std::numbers::pi / 9.0;
    c.nu = 0.0;
    c.t = 0.005;
    c.load_thickness_power = 2;
    c.trial = "1";
    c.trial_output = {"radial", "xi1_min*xi1_max", "xi1_min*xi1_max", "", ""};
    c.rotation_basis = RotationBasis::vframe;
    c.normalize_loss = true;
    c.n_collocation = desk ? 8192 : 65536;
    c.epochs = 1000;
    c.display_scale = 0.001;
  } else if (base == "hemisphere") {
    c.chart = ChartKind::hemisphere;
    c.radius = 1.0;
    c.nu = 0.3;
    c.t = 0.05;
    c.load_thickness_power = 1;
    c.load_kernel_width = 0.1;
    c.trial = "disc";
    c.n_collocation = desk ? 4096 : 78400;
    c.epochs = 100;
    c.display_scale = 0.05;
  } else if (base == "flat_plate_patch" && !desk) {
    c.chart = ChartKind::flat_plate;
    c.nu = 0.3;
    c.t = 0.1;
    c.load_z = 0.0;
    c.epochs = 0;
    c.eval_grid = 11;
  } else if (base == "topopt_plate") {
    c.chart = ChartKind::flat_plate;
    c.nu = 0.3;
    c.t = 0.1;
    c.t_init = 0.1;
    c.volume_fraction = 0.8;
    c.t_min = 0.02;
    c.t_max = 0.2;
    c.load_thickness_power = 0;
    c.trial = "xi1_min*xi1_max*xi2_min*xi2_max";
    c.n_collocation = desk ? 512 : 1024;
    c.width_neurons = 30;
    c.outer_iters = desk ? 10 : 20;
  } else {
    throw ConfigError("benchmark", "unknown benchmark preset '" + id + "'");
  }
  return c;
}

inline Problem RunConfig::problem() const {
  Problem p;
  switch (chart) {
    case ChartKind::flat_plate: p.chart = Chart::flat_plate(length, width); break;
    case ChartKind::hyperbolic_paraboloid: p.chart = Chart::hyperbolic_paraboloid(length, height); break;
    case ChartKind::scordelis_lo: p.chart = Chart::scordelis_lo(length, radius, half_angle); break;
    case ChartKind::hemisphere: p.chart = Chart::hemisphere(radius); break;
  }
  p.material = {E, nu, kappa, t};
  p.load.force = {load_x, load_y, load_z};
  p.load.thickness_power = load_thickness_power;
  p.load.kernel_width = load_kernel_width;
  p.trial = TrialFunction::uniform(p.chart.domain(), detail::keyed("trial", [&] { return TrialProduct::parse(trial); }));
  for (int i = 0; i < 5; ++i) {
    if (trial_output[i].empty()) continue;
    p.trial.phi[i] = detail::keyed(std::string("trial_") + kFieldNames[i],
                                   [&] { return TrialProduct::parse(trial_output[i]); });
  }
  p.basis = rotation_basis;
  p.neumann_edges = neumann_edges;
  p.dirichlet_edges = dirichlet_edges;
  return p;
}

inline void RunConfig::validate() const {
  problem().validate();
  if (n_collocation == 0) throw ConfigError("n_collocation", "must be positive");
  if (!neumann_edges.empty() && loss == LossKind::strong && n_boundary_neumann == 0) {
    throw ConfigError("n_boundary_neumann", "the strong form needs points on the Neumann edges");
  }
  if (!dirichlet_edges.empty() && loss == LossKind::strong && n_boundary_dirichlet == 0) {
    throw ConfigError("n_boundary_dirichlet", "the strong form needs points on the Dirichlet edges");
  }
  if (hidden_layers < 1) throw ConfigError("hidden_layers", "must be at least 1");
  if (width_neurons < 1) throw ConfigError("neurons", "must be at least 1");
  if (epochs < 0) throw ConfigError("epochs", "must be non-negative");
  if (!(lr > 0.0)) throw ConfigError("lr", "must be positive");
  if (!(lambda_bc >= 0.0)) throw ConfigError("lambda_bc", "must be non-negative");
  if (eval_grid < 2) throw ConfigError("eval_grid", "must be at least 2");
  if (thickness_hidden_layers < 1) throw ConfigError("thickness_hidden_layers", "must be at least 1");
  if (thickness_width < 1) throw ConfigError("thickness_neurons", "must be at least 1");
}

/// Applies flat key/value pairs; `benchmark` (if present) is applied first and
/// replaces every setting by the preset's.
inline RunConfig apply_settings(RunConfig c, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv)
    if (k == "benchmark") c = preset(v);
  const auto& table = detail::fields();
  for (const auto& [k, v] : kv) {
    if (k == "benchmark") continue;
    const auto it = table.find(k);
    if (it == table.end()) throw ConfigError(k, "unknown configuration key '" + k + "'");
    detail::keyed(k, [&] {
      it->second.set(c, v);
      return 0;
    });
  }
  return c;
}

inline RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config", std::string("malformed config: ") + e.what());
  }
  if (root.IsNull()) return RunConfig{};
  if (!root.IsMap()) throw ConfigError("config", "config must be a flat mapping of keys to values");
  std::vector<std::pair<std::string, std::string>> kv;
  for (const auto& it : root) {
    const std::string key = it.first.as<std::string>();
    if (!it.second.IsScalar()) throw ConfigError(key, "value must be a scalar");
    kv.emplace_back(key, it.second.as<std::string>());
  }
  RunConfig c = apply_settings(RunConfig{}, kv);
  c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

/// Every key with its current value, as written in a config file.
inline std::map<std::string, std::string> config_echo(const RunConfig& c) {
  std::map<std::string, std::string> out;
  out["benchmark"] = c.benchmark;
  for (const auto& [k, f] : detail::fields()) out[k] = f.get(c);
  return out;
}

}  // namespace shellpinn
