#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "shellpinn/bench/config.hpp"
#include "shellpinn/io/fields_io.hpp"
#include "shellpinn/io/report.hpp"
#include "shellpinn/topopt/topopt.hpp"
#include "shellpinn/training/fields.hpp"
#include "shellpinn/training/train.hpp"

namespace shellpinn {

/// Collocation points of a run. `epoch` > 0 draws a fresh random set (used by
/// resample_every_epoch).
inline PointSet make_points(const RunConfig& c, const Problem& p, std::uint64_t epoch = 0) {
  PointSet s;
  s.interior = sample_interior(p.chart.domain(), c.n_collocation, c.sampler, c.seed + epoch);
  if (c.loss == LossKind::strong) {
    for (Edge e : p.neumann_edges)
      for (const auto& b : sample_boundary(p.chart, e, c.n_boundary_neumann)) s.neumann.push_back(b);
    for (Edge e : p.dirichlet_edges)
      for (const auto& b : sample_boundary(p.chart, e, c.n_boundary_dirichlet)) s.dirichlet.push_back(b);
  }
  return s;
}

inline std::vector<int> network_widths(const RunConfig& c) { return mlp_widths(c.hidden_layers, c.width_neurons); }

/// Reference fields for the evaluation grid, from the configured file.
inline FieldTable reference_on_grid(const RunConfig& c, const Problem& p) {
  return interpolate_reference(ingest_reference(c.reference), p.chart,
                               eval_grid(p.chart.domain(), c.eval_grid));
}

/// Free-edge midpoint of the Scordelis-Lo roof and the factor mapping the
/// scaled deflection to the original benchmark units.
inline Vec2d scordelis_probe_point(const Chart& ch) { return {0.0, ch.domain().hi2}; }
inline double scordelis_rescale(const RunConfig& c) {
  return c.geometric_factor * (c.orig_load / c.orig_E) / (c.t * c.t);
}

struct SolveResult {
  TrainState state;
  FieldTable fields;
  Report report;
};

/// Trains per the configuration, evaluates fields on the eval grid, computes
/// reference errors and probes, and writes the configured outputs.
inline SolveResult run_solve(const RunConfig& c, const EpochHook& hook = {}) {
  c.validate();
  if (c.resample_every_epoch && c.sampler != Sampler::uniform_random) {
    throw ConfigError("resample_every_epoch", "resampling needs sampler: uniform_random");
  }
  const Problem p = c.problem();
  const std::vector<Vec2d> grid = eval_grid(p.chart.domain(), c.eval_grid);
  FieldTable ref;
  const bool has_ref = !c.reference.empty();
  if (has_ref) ref = reference_on_grid(c, p);
  TrainConfig tc;
  tc.epochs = c.epochs;
  tc.optimizer = c.optimizer;
  tc.adam.lr = c.lr;
  tc.loss_scale = c.loss_scale();
  SolveResult r;
  r.state = TrainState(init(network_widths(c), c.activation, c.init_seed), tc);
  const std::function<double(const Mlp&)> error = [&](const Mlp& net) {
    return l2_error(evaluate_fields(net, p, grid), ref).average;
  };
  if (!c.resample_every_epoch) {
    const LossEvaluator L(p, make_points(c, p), c.loss, c.lambda_bc);
    train(r.state, L, tc, has_ref ? error : nullptr, hook);
  } else {
    TrainConfig one = tc;
    one.epochs = 1;
    for (int e = 0; e < c.epochs; ++e) {
      const LossEvaluator L(p, make_points(c, p, static_cast<std::uint64_t>(e)), c.loss, c.lambda_bc);
      train(r.state, L, one, has_ref ? error : nullptr, hook);
    }
  }
  r.fields = evaluate_fields(r.state.net, p, grid);
  Report& rep = r.report;
  rep.benchmark = c.benchmark;
  rep.mode = "solve";
  rep.loss_history = r.state.loss_history;
  rep.error_history = r.state.error_history;
  rep.line_search_failures = r.state.line_search_failures;
  rep.wall_seconds = r.state.wall_seconds;
  rep.config = config_echo(c);
  if (has_ref) {
    const L2Error e = l2_error(r.fields, ref);
    for (int i = 0; i < 5; ++i) rep.l2_errors[kFieldNames[i]] = e.field[i];
    rep.l2_errors["average"] = e.average;
  }
  if (p.chart.kind == ChartKind::scordelis_lo) {
    const Vec2d xi = scordelis_probe_point(p.chart);
    const FieldTable probe = evaluate_fields(r.state.net, p, {xi});
    rep.probes["u3_free_edge_midpoint"] = probe.f[2][0];
    rep.probes["u3_free_edge_midpoint_rescaled"] = probe.f[2][0] * scordelis_rescale(c);
  }
  if (!c.fields_out.empty()) export_fields(c.fields_out, r.fields);
  if (!c.report_out.empty()) save_report(c.report_out, rep);
  return r;
}

struct PatchResult {
  double max_residual = 0.0;        // max |strong residual| over the grid
  double max_resultant_error = 0.0;  // max |n - t C:e| over the grid
};

/// Patch test on a flat plate: the linear displacement u = (a x + b y, c x + d y, 0)
/// with zero rotations and no load must give constant n = t C:e and vanishing
/// strong residuals.
inline PatchResult patch_test(const RunConfig& cfg, std::array<double, 4> g = {0.01, 0.02, 0.005, -0.03}) {
  cfg.validate();
  Problem p = cfg.problem();
  if (p.chart.kind != ChartKind::flat_plate) throw ConfigError("chart", "the patch test needs a flat plate");
  p.trial = TrialFunction::none(p.chart.domain());
  p.load.force = {0.0, 0.0, 0.0};
  const double t = p.material.t, c0 = p.material.plane_stress_lambda(), mu = p.material.moduli().mu;
  const double e11 = g[0], e22 = g[3], e12 = 0.5 * (g[1] + g[2]);
  const double n11 = t * ((c0 + 2 * mu) * e11 + c0 * e22), n22 = t * ((c0 + 2 * mu) * e22 + c0 * e11),
               n12 = t * 2 * mu * e12;
  PatchResult out;
  for (const Vec2d& xi : eval_grid(p.chart.domain(), cfg.eval_grid)) {
    std::array<double, kJet2> z{};
    z[0] = g[0] * xi[0] + g[1] * xi[1];
    z[1] = g[2] * xi[0] + g[3] * xi[1];
    z[kOutputs + 0] = g[0];
    z[kOutputs + 1] = g[2];
    z[2 * kOutputs + 0] = g[1];
    z[2 * kOutputs + 1] = g[3];
    const auto r = point_strong_residual<double>(z, build_geometry_jet(p.chart, xi), p, xi, ad::Dual1(t));
    for (double v : r) out.max_residual = std::max(out.max_residual, std::abs(v));
    const auto geo = build_geometry(p.chart, xi);
    const auto s = point_strains<double>(std::span<const double>(z.data(), kJet1), geo, p, xi);
    const auto n = resultants(s, material_tensors(p, geo.a_con), t, p.material.kappa).n;
    for (double d : {n[0][0] - n11, n[1][1] - n22, n[0][1] - n12, n[1][0] - n12})
      out.max_resultant_error = std::max(out.max_resultant_error, std::abs(d));
  }
  return out;
}

/// Thickness field sampled on points, as a table with columns xi1,xi2,x,y,z,t.
inline void export_thickness(const std::string& path, const Chart& chart, const ThicknessField& psi,
                             const std::vector<Vec2d>& pts) {
  std::ofstream os(path);
  if (!os) throw Error("io", "cannot open '" + path + "' for writing");
  os << "xi1,xi2,x,y,z,t\n";
  const auto t = psi.values(pts);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const auto x = chart.map(pts[j][0], pts[j][1]);
    os << format_double(pts[j][0]) << ',' << format_double(pts[j][1]) << ',' << format_double(x[0]) << ','
       << format_double(x[1]) << ',' << format_double(x[2]) << ',' << format_double(t[j]) << '\n';
  }
  if (!os) throw Error("io", "failed writing '" + path + "'");
}

struct TopoptRunResult {
  TopoptResult result;
  double V0 = 0.0;
  Report report;
};

/// Topology optimization of the configured problem; Dirichlet conditions come
/// from the trial functions and free edges contribute natural-BC constraints.
inline TopoptRunResult run_topopt(const RunConfig& c, const OuterHook& hook = {}) {
  c.validate();
  const Problem p = c.problem();
  PointSet pts;
  pts.interior = sample_interior(p.chart.domain(), c.n_collocation, c.sampler, c.seed);
  for (Edge e : p.neumann_edges) {
    if (c.n_boundary_neumann == 0) throw ConfigError("n_boundary_neumann", "free edges need natural-BC points");
    for (const auto& b : sample_boundary(p.chart, e, c.n_boundary_neumann)) pts.neumann.push_back(b);
  }
  TopoptEvaluator ev(p, std::move(pts));
  TopoptConfig tc;
  tc.V0 = c.V0 > 0.0 ? c.V0 : c.volume_fraction * c.t_init * ev.area();
  tc.t_min = c.t_min;
  tc.t_max = c.t_max;
  tc.mu_init = c.mu_init;
  tc.outer_iters = c.outer_iters;
  tc.inner_epochs = c.inner_epochs;
  tc.constraint_tol = c.constraint_tol;
  tc.volume_tol = c.volume_tol;
  tc.warmup_epochs = c.warmup_epochs;
  ThicknessField psi = ThicknessField::uniform(mlp_widths(c.thickness_hidden_layers, c.thickness_width, 1),
                                               c.activation, c.init_seed + 1, c.t_min, c.t_max, c.t_init);
  TopoptRunResult out;
  out.V0 = tc.V0;
  out.result = topopt_run(ev, tc, init(network_widths(c), c.activation, c.init_seed), std::move(psi), hook);
  const TopoptResult& r = out.result;
  Report& rep = out.report;
  rep.benchmark = c.benchmark;
  rep.mode = "topopt";
  rep.converged = r.converged;
  rep.wall_seconds = r.wall_seconds;
  rep.config = config_echo(c);
  for (const auto& o : r.history) {
    rep.series["compliance"].push_back(o.compliance);
    rep.series["volume"].push_back(o.volume);
    rep.series["volume_residual"].push_back(o.volume_residual);
    rep.series["equilibrium_inf"].push_back(o.equilibrium_inf);
    rep.series["al_loss"].push_back(o.al_loss);
    rep.series["mu"].push_back(o.mu);
    rep.series["feasible"].push_back(o.feasible ? 1.0 : 0.0);
    rep.line_search_failures += o.line_search_failures;
  }
  for (const auto& m : r.multipliers) {
    rep.multipliers.push_back(
        {static_cast<double>(m.iteration), static_cast<double>(m.index), m.lambda_old, m.mu, m.h, m.lambda_new});
  }
  rep.probes["V0"] = tc.V0;
  if (!r.history.empty()) {
    rep.probes["final_compliance"] = r.history.back().compliance;
    rep.probes["final_volume_residual"] = r.history.back().volume_residual;
  }
  if (!c.thickness_out.empty()) {
    export_thickness(c.thickness_out, p.chart, r.psi, eval_grid(p.chart.domain(), c.eval_grid));
  }
  if (!c.fields_out.empty()) export_fields(c.fields_out, evaluate_fields(r.tau, p, eval_grid(p.chart.domain(), c.eval_grid)));
  if (!c.report_out.empty()) save_report(c.report_out, rep);
  return out;
}

}  // namespace shellpinn
