#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "shellpinn/errors.hpp"
#include "shellpinn/geometry/geometry.hpp"
#include "shellpinn/network/batch_jet.hpp"
#include "shellpinn/network/mlp.hpp"
#include "shellpinn/sampling/sampling.hpp"
#include "shellpinn/training/point_ops.hpp"
#include "shellpinn/training/problem.hpp"

namespace shellpinn {

inline constexpr std::array<const char*, 5> kFieldNames{"u1", "u2", "u3", "theta1", "theta2"};

/// Solution fields sampled at points: global displacement u_hat and covariant
/// rotations theta_a, with the mapped midsurface position.
struct FieldTable {
  std::vector<Vec2d> xi;
  std::vector<Vec3<double>> x;
  std::array<std::vector<double>, 5> f;

  std::size_t size() const { return xi.size(); }
};

/// Regular n x n grid over the reference domain, boundaries included. On a
/// disc the grid of the bounding square is clipped to the interior sampling
/// radius.
inline std::vector<Vec2d> eval_grid(const RefDomain& d, int n) {
  if (n < 2) throw ConfigError("eval_grid", "grid resolution must be at least 2");
  std::vector<Vec2d> out;
  const double rmax = (1.0 - kDiscShrink) * d.radius;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2d p{d.lo1 + (d.hi1 - d.lo1) * i / (n - 1), d.lo2 + (d.hi2 - d.lo2) * j / (n - 1)};
      if (d.kind == DomainKind::disc && std::hypot(p[0], p[1]) > rmax) continue;
      out.push_back(p);
    }
  return out;
}

/// (u_hat, theta) at xi from a raw first-order jet.
inline std::array<double, 5> fields_from_jet(std::span<const double> z, const Problem& p, Vec2d xi) {
  const FieldJet<double> fj = apply_trial(raw_field_jet(z), p.trial, xi);
  const LocalFields<double> l = to_local(fj, build_geometry(p.chart, xi), p.basis);
  return {fj.u_hat[0], fj.u_hat[1], fj.u_hat[2], l.theta[0], l.theta[1]};
}

/// Fields of the constrained network output at `pts`.
inline FieldTable evaluate_fields(const Mlp& net, const Problem& p, const std::vector<Vec2d>& pts) {
  FieldTable t;
  t.xi = pts;
  for (auto& f : t.f) f.resize(pts.size());
  t.x.resize(pts.size());
  BatchJet jet;
  jet.forward(net, pts, 1);
  std::array<double, kJet1> z{};
  for (std::size_t j = 0; j < pts.size(); ++j) {
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < kOutputs; ++i) z[c * kOutputs + i] = jet.output(c)(i, static_cast<Eigen::Index>(j));
    const auto v = fields_from_jet(z, p, pts[j]);
    for (int i = 0; i < 5; ++i) t.f[i][j] = v[i];
    t.x[j] = p.chart.map(pts[j][0], pts[j][1]);
  }
  return t;
}

struct L2Error {
  std::array<double, 5> field{};
  double average = 0.0;
};

/// Relative L2 error ||ref - pred|| / ||ref|| per field over matching grids,
/// and the average of the five.
inline L2Error l2_error(const FieldTable& pred, const FieldTable& ref) {
  if (pred.size() != ref.size()) {
    throw DimensionError("l2_error: prediction has " + std::to_string(pred.size()) + " points, reference has " +
                         std::to_string(ref.size()));
  }
  L2Error e;
  for (int i = 0; i < 5; ++i) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < ref.size(); ++j) {
      const double d = ref.f[i][j] - pred.f[i][j];
      num += d * d;
      den += ref.f[i][j] * ref.f[i][j];
    }
    if (den == 0.0) {
      throw Error("metrics", std::string("reference field ") + kFieldNames[i] +
                                 " is identically zero; its relative error is undefined");
    }
    e.field[i] = std::sqrt(num / den);
    e.average += e.field[i] / 5.0;
  }
  return e;
}

}  // namespace shellpinn
