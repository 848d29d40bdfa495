#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "shellpinn/autodiff/dual.hpp"
#include "shellpinn/geometry/geometry.hpp"
#include "shellpinn/mechanics/constitutive.hpp"
#include "shellpinn/mechanics/kinematics.hpp"
#include "shellpinn/mechanics/statics.hpp"
#include "shellpinn/network/trial.hpp"
#include "shellpinn/training/problem.hpp"

namespace shellpinn {

/// Raw network jets at one point are flattened as z[c * 5 + i]: component c
/// (value, d1, d2, d11, d12, d22) of output i (u1, u2, u3, rot1, rot2).
inline constexpr int kOutputs = 5;
inline constexpr int kJet1 = 3 * kOutputs;
inline constexpr int kJet2 = 6 * kOutputs;

template <class S>
FieldJet<S> raw_field_jet(std::span<const S> z) {
  FieldJet<S> f;
  for (int i = 0; i < 3; ++i) {
    f.u_hat[i] = z[i];
    f.du_hat[i] = {z[5 + i], z[10 + i]};
  }
  for (int a = 0; a < 2; ++a) {
    f.rot[a] = z[3 + a];
    f.drot[a] = {z[8 + a], z[13 + a]};
  }
  return f;
}

/// Second-order variant: every field is a dual carrying its own partials.
template <class S>
FieldJet<ad::Dual<S>> raw_field_jet2(std::span<const S> z) {
  using D = ad::Dual<S>;
  auto entry = [&](int i) {
    const D v(z[i], z[5 + i], z[10 + i]);
    const Vec2<D> d{D(z[5 + i], z[15 + i], z[20 + i]), D(z[10 + i], z[20 + i], z[25 + i])};
    return std::pair{v, d};
  };
  FieldJet<D> f;
  for (int i = 0; i < 3; ++i) std::tie(f.u_hat[i], f.du_hat[i]) = entry(i);
  for (int a = 0; a < 2; ++a) std::tie(f.rot[a], f.drot[a]) = entry(3 + a);
  return f;
}

template <class S>
ElasticityTensors<S> material_tensors(const Problem& p, const Mat2<S>& a_con) {
  const Lame l = p.material.moduli();
  return elasticity_tensors(a_con, l.lambda, l.mu);
}

template <class S>
Strains<S> point_strains(std::span<const S> z, const SurfaceGeometry<S>& g, const Problem& p, Vec2d xi) {
  return strains(to_local(apply_trial(raw_field_jet(z), p.trial, xi), g, p.basis), g);
}

/// Energy densities per unit area at one point. `external` is the load
/// potential -F.u, so the total potential density is internal() + external.
template <class S>
EnergyDensities<S> point_energy(std::span<const S> z, const SurfaceGeometry<S>& g, const Problem& p,
                                Vec2d xi, const S& t) {
  const FieldJet<S> f = apply_trial(raw_field_jet(z), p.trial, xi);
  const Strains<S> s = strains(to_local(f, g, p.basis), g);
  const Vec3<S> F = p.load.at(xi, t);
  const S w = -(F[0] * f.u_hat[0] + F[1] * f.u_hat[1] + F[2] * f.u_hat[2]);
  return energy_densities(s, material_tensors(p, g.a_con), t, p.material.kappa, w);
}

/// Equilibrium residuals (moment, tangential, normal) at an interior point for
/// a thickness field given with its first partials.
template <class S>
std::array<S, 5> point_strong_residual(std::span<const S> z, const SurfaceGeometry<ad::Dual<S>>& g,
                                       const Problem& p, Vec2d xi, const ad::Dual<S>& t) {
  const auto f = apply_trial(raw_field_jet2(z), p.trial, xi);
  const auto s = strains(to_local(f, g, p.basis), g);
  const auto r = resultants(s, material_tensors(p, g.a_con), t, p.material.kappa);
  return strong_residuals(r, g, global_load_to_local(g, p.load.at(xi, t.v))).components();
}

/// Natural boundary residuals (m.nu, (n - b.m).nu, q.nu) at a boundary point.
template <class S>
std::array<S, 5> point_natural_bc(std::span<const S> z, const SurfaceGeometry<S>& g, const Problem& p,
                                  const BoundarySample& b, const S& t) {
  const Strains<S> s = point_strains(z, g, p, b.xi);
  const Resultants<S> r = resultants(s, material_tensors(p, g.a_con), t, p.material.kappa);
  return natural_bc_residuals(r, g.b_mix, b.nu_cov);
}

/// Prescribed outputs after the trial function; unprescribed entries are 0.
template <class S>
std::array<S, 5> point_dirichlet(std::span<const S> z, const Problem& p, Vec2d xi) {
  const FieldJet<S> f = apply_trial(raw_field_jet(z), p.trial, xi);
  const std::array<S, 5> v{f.u_hat[0], f.u_hat[1], f.u_hat[2], f.rot[0], f.rot[1]};
  std::array<S, 5> out{};
  for (int i = 0; i < 5; ++i) out[i] = p.dirichlet_mask[i] ? v[i] : S(0.0);
  return out;
}

/// The same problem with load and lifts removed, so that every per-point map
/// from raw jets becomes linear.
inline Problem homogeneous(const Problem& p) {
  Problem h = p;
  h.load.force = {0.0, 0.0, 0.0};
  h.trial.lift.fill(0.0);
  return h;
}

/// y = M z + c, recovered column by column from a map that is affine in z.
template <int Rows, int Cols>
struct AffineMap {
  Eigen::Matrix<double, Rows, Cols> M;
  Eigen::Matrix<double, Rows, 1> c;
};

/// `lin` must be the linear part of `full`, which supplies the offset at z = 0.
template <int Rows, int Cols, class Lin, class Full>
AffineMap<Rows, Cols> affine_map(Lin&& lin, Full&& full) {
  AffineMap<Rows, Cols> out;
  std::array<double, Cols> z{};
  const auto c = full(std::span<const double>(z));
  for (int r = 0; r < Rows; ++r) out.c(r) = c[r];
  for (int k = 0; k < Cols; ++k) {
    z[k] = 1.0;
    const auto col = lin(std::span<const double>(z));
    for (int r = 0; r < Rows; ++r) out.M(r, k) = col[r];
    z[k] = 0.0;
  }
  return out;
}

template <class S>
std::array<S, 10> flatten(const Strains<S>& s) {
  return {s.e[0][0], s.e[0][1], s.e[1][0], s.e[1][1], s.k[0][0], s.k[0][1],
          s.k[1][0], s.k[1][1], s.gamma[0], s.gamma[1]};
}

/// Weak-form density at one interior point as exact affine maps from the
/// first-order raw jet: strains s = B z + b, load potential at unit load
/// factor g.z + g0.
struct WeakPointOp {
  Eigen::Matrix<double, 10, kJet1> B;
  Eigen::Matrix<double, 10, 1> b;
  Eigen::Matrix<double, 1, kJet1> g;
  double g0 = 0.0;
  Eigen::Matrix4d C;  // C(2a+b, 2s+r) = C^{ab sr}
  Eigen::Matrix2d D;
  double kappa = 0.0;
  int load_power = 0;
  double weight = 0.0;  // |omega| / N * sqrt(a)

  WeakPointOp() = default;
  WeakPointOp(const Problem& p, const SurfaceGeometry<double>& geo, Vec2d xi, double weight_)
      : kappa(p.material.kappa), load_power(p.load.thickness_power), weight(weight_) {
    const Problem h = homogeneous(p);
    const auto strain_map = affine_map<10, kJet1>(
        [&](std::span<const double> z) { return flatten(point_strains(z, geo, h, xi)); },
        [&](std::span<const double> z) { return flatten(point_strains(z, geo, p, xi)); });
    B = strain_map.M;
    b = strain_map.c;
    const double prof = p.load.profile(xi);
    auto potential = [&](const Problem& q) {
      return [&q, &xi, prof](std::span<const double> z) {
        const FieldJet<double> f = apply_trial(raw_field_jet(z), q.trial, xi);
        double w = 0.0;
        for (int i = 0; i < 3; ++i) w -= prof * q.load.force[i] * f.u_hat[i];
        return std::array<double, 1>{w};
      };
    };
    Problem unlifted = p;
    unlifted.trial.lift.fill(0.0);
    const auto pot = affine_map<1, kJet1>(potential(unlifted), potential(p));
    g = pot.M;
    g0 = pot.c(0);
    const auto T = material_tensors(p, geo.a_con);
    for (int a = 0; a < 2; ++a)
      for (int bb = 0; bb < 2; ++bb) {
        for (int s = 0; s < 2; ++s)
          for (int r = 0; r < 2; ++r) C(2 * a + bb, 2 * s + r) = T.C[a][bb][s][r];
        D(a, bb) = T.D[a][bb];
      }
  }

  /// Densities at raw jet z and thickness t; optionally the partials of the
  /// total density with respect to z and t.
  EnergyDensities<double> eval(const Eigen::Matrix<double, kJet1, 1>& z, double t,
                               Eigen::Matrix<double, kJet1, 1>* dz = nullptr, double* dt = nullptr) const {
    const Eigen::Matrix<double, 10, 1> s = B * z + b;
    const Eigen::Vector4d e = s.head<4>(), k = s.segment<4>(4);
    const Eigen::Vector2d gam = s.tail<2>();
    const Eigen::Vector4d Ce = C * e, Ck = C * k;
    const Eigen::Vector2d Dg = D * gam;
    const double bend = t * t * t / 12.0;
    double tf = 1.0;
    for (int i = 0; i < load_power; ++i) tf *= t;
    EnergyDensities<double> out{0.5 * t * e.dot(Ce), 0.5 * bend * k.dot(Ck), 0.5 * kappa * t * gam.dot(Dg),
                                tf * (g.dot(z) + g0)};
    if (dz) {
      Eigen::Matrix<double, 10, 1> ds;
      ds << t * Ce, bend * Ck, kappa * t * Dg;
      *dz = B.transpose() * ds + tf * g.transpose();
    }
    if (dt) *dt = (out.membrane + 3.0 * out.bending + out.shear + load_power * out.external) / t;
    return out;
  }
};

/// A residual vector affine in the raw jet: r = M z + c.
template <int Cols>
using ResidualOp = AffineMap<5, Cols>;

inline ResidualOp<kJet2> strong_point_op(const Problem& p, const SurfaceGeometry<ad::Dual1>& geo, Vec2d xi,
                                         double t) {
  const Problem h = homogeneous(p);
  const ad::Dual1 tj(t);
  return affine_map<5, kJet2>(
      [&](std::span<const double> z) { return point_strong_residual<double>(z, geo, h, xi, tj); },
      [&](std::span<const double> z) { return point_strong_residual<double>(z, geo, p, xi, tj); });
}

inline ResidualOp<kJet1> natural_bc_op(const Problem& p, const SurfaceGeometry<double>& geo,
                                       const BoundarySample& bs, double t) {
  const Problem h = homogeneous(p);
  return affine_map<5, kJet1>(
      [&](std::span<const double> z) { return point_natural_bc<double>(z, geo, h, bs, t); },
      [&](std::span<const double> z) { return point_natural_bc<double>(z, geo, p, bs, t); });
}

inline ResidualOp<kJet1> dirichlet_op(const Problem& p, Vec2d xi) {
  const Problem h = homogeneous(p);
  return affine_map<5, kJet1>([&](std::span<const double> z) { return point_dirichlet<double>(z, h, xi); },
                              [&](std::span<const double> z) { return point_dirichlet<double>(z, p, xi); });
}

}  // namespace shellpinn
