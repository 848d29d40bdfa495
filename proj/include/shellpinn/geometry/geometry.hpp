#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "shellpinn/autodiff/dual.hpp"
#include "shellpinn/autodiff/jet.hpp"
#include "shellpinn/errors.hpp"
#include "shellpinn/geometry/chart.hpp"
#include "shellpinn/small_tensor.hpp"

namespace shellpinn {

using ad::Mat2d;
using ad::Vec2d;

/// Differential geometry of the midsurface at one point. With T = Dual<double>
/// every field also carries its partials with respect to (xi^1, xi^2).
template <class T>
struct SurfaceGeometry {
  Vec3<T> a1, a2, a3;
  Mat2<T> a_cov, a_con;
  T sqrt_a;
  Mat2<T> b_cov;  // b_{ab}
  Mat2<T> b_mix;  // b^a_b, first index raised
  Mat2<T> c_cov;  // c_{ab} = b^r_a b_{rb}
  std::array<Mat2<T>, 2> gamma;  // gamma[r][a][b] = Gamma^r_{ab}
  Mat3<T> Tu;                    // rows a1, a2, a3
  std::array<Vec3<T>, 2> Ttheta; // rows a1, a2
  std::array<Mat3<T>, 2> dTu;    // dTu[b] = d Tu / d xi^b
  Vec3<T> V1, V2;
  std::array<Vec2<T>, 3> Tv;     // columns (V2, V1)
  Mat2<T> Rv;                    // Rv[a][j] = a_a . Tv[:, j]
  std::array<Mat2<T>, 2> dRv;    // dRv[b] = d Rv / d xi^b
};

/// Converts every field to another scalar type (e.g. double -> Var constants).
template <class To, class From>
SurfaceGeometry<To> cast_geometry(const SurfaceGeometry<From>& g) {
  SurfaceGeometry<To> o;
  o.a1 = tensor_cast<Vec3<To>>(g.a1);
  o.a2 = tensor_cast<Vec3<To>>(g.a2);
  o.a3 = tensor_cast<Vec3<To>>(g.a3);
  o.a_cov = tensor_cast<Mat2<To>>(g.a_cov);
  o.a_con = tensor_cast<Mat2<To>>(g.a_con);
  o.sqrt_a = ad::scalar_cast<To>(g.sqrt_a);
  o.b_cov = tensor_cast<Mat2<To>>(g.b_cov);
  o.b_mix = tensor_cast<Mat2<To>>(g.b_mix);
  o.c_cov = tensor_cast<Mat2<To>>(g.c_cov);
  o.gamma = tensor_cast<std::array<Mat2<To>, 2>>(g.gamma);
  o.Tu = tensor_cast<Mat3<To>>(g.Tu);
  o.Ttheta = tensor_cast<std::array<Vec3<To>, 2>>(g.Ttheta);
  o.dTu = tensor_cast<std::array<Mat3<To>, 2>>(g.dTu);
  o.V1 = tensor_cast<Vec3<To>>(g.V1);
  o.V2 = tensor_cast<Vec3<To>>(g.V2);
  o.Tv = tensor_cast<std::array<Vec2<To>, 3>>(g.Tv);
  o.Rv = tensor_cast<Mat2<To>>(g.Rv);
  o.dRv = tensor_cast<std::array<Mat2<To>, 2>>(g.dRv);
  return o;
}

template <class S>
struct VFrame {
  Vec3<S> V1, V2;
  std::array<Vec2<S>, 3> Tv;
};

/// Tangent frame {V1, V2} built from the unit normal and the global y axis.
template <class S>
VFrame<S> v_frame(const Vec3<S>& a3) {
  Vec3<S> c{a3[2], S(0.0), -a3[0]};  // e_y x a3
  VFrame<S> f;
  const double n2 = ad::value_of(dot(c, c));
  if (n2 <= 1e-24) {
    f.V1 = {S(0.0), S(0.0), S(1.0)};
  } else {
    const S inv = 1.0 / ad::sqrt(dot(c, c));
    f.V1 = scale(c, inv);
  }
  f.V2 = cross(f.V1, a3);
  for (int i = 0; i < 3; ++i) f.Tv[i] = {f.V2[i], f.V1[i]};
  return f;
}

namespace detail {
inline std::string point_str(double x1, double x2) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << x1 << ", " << x2 << ")";
  return os.str();
}
}  // namespace detail

/// Evaluates the chart to third order at `xi` and assembles every geometric
/// quantity. T is double or a first-order dual already seeded on (xi^1, xi^2).
template <class T>
SurfaceGeometry<T> build_geometry(const Chart& chart, const Vec2<T>& xi) {
  using D = ad::Dual<T>;
  using DD = ad::Dual<D>;
  const DD x1{D(xi[0], T(1.0), T(0.0)), D(T(1.0)), D(T(0.0))};
  const DD x2{D(xi[1], T(0.0), T(1.0)), D(T(0.0)), D(T(1.0))};
  const Vec3<DD> phi = chart.map<DD>(x1, x2);

  // Tangent vectors with their partials; second partials of phi as plain T.
  std::array<Vec3<D>, 2> aD;
  Vec3<T> phi_ab[2][2];
  for (int a = 0; a < 2; ++a) {
    for (int k = 0; k < 3; ++k) aD[a][k] = phi[k].d[a];
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 3; ++k) phi_ab[a][b][k] = phi[k].d[a].d[b];
  }

  const Vec3<D> nD = cross(aD[0], aD[1]);
  const D n2 = dot(nD, nD);
  if (!(ad::value_of(n2) > 1e-24)) {
    throw GeometryError("degenerate surface basis at xi = " +
                        detail::point_str(ad::value_of(xi[0]), ad::value_of(xi[1])));
  }
  const D lenD = ad::sqrt(n2);
  const Vec3<D> a3D = scale(nD, D(1.0) / lenD);

  SurfaceGeometry<T> g;
  for (int k = 0; k < 3; ++k) {
    g.a1[k] = aD[0][k].v;
    g.a2[k] = aD[1][k].v;
    g.a3[k] = a3D[k].v;
  }
  g.sqrt_a = lenD.v;
  const Vec3<T>* av[2] = {&g.a1, &g.a2};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) g.a_cov[a][b] = dot(*av[a], *av[b]);
  g.a_con = inverse(g.a_cov);

  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) g.b_cov[a][b] = dot(g.a3, phi_ab[a][b]);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      g.b_mix[a][b] = g.a_con[a][0] * g.b_cov[0][b] + g.a_con[a][1] * g.b_cov[1][b];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      g.c_cov[a][b] = g.b_mix[0][a] * g.b_cov[0][b] + g.b_mix[1][a] * g.b_cov[1][b];

  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const T p0 = dot(g.a1, phi_ab[a][b]);
      const T p1 = dot(g.a2, phi_ab[a][b]);
      for (int r = 0; r < 2; ++r) g.gamma[r][a][b] = g.a_con[r][0] * p0 + g.a_con[r][1] * p1;
    }
  }

  g.Tu = {g.a1, g.a2, g.a3};
  g.Ttheta = {g.a1, g.a2};
  for (int b = 0; b < 2; ++b) {
    g.dTu[b][0] = phi_ab[0][b];
    g.dTu[b][1] = phi_ab[1][b];
    for (int k = 0; k < 3; ++k) g.dTu[b][2][k] = a3D[k].d[b];
  }

  const VFrame<D> vf = v_frame(a3D);
  for (int k = 0; k < 3; ++k) {
    g.V1[k] = vf.V1[k].v;
    g.V2[k] = vf.V2[k].v;
    g.Tv[k] = {vf.Tv[k][0].v, vf.Tv[k][1].v};
  }
  for (int a = 0; a < 2; ++a) {
    for (int j = 0; j < 2; ++j) {
      D r = aD[a][0] * vf.Tv[0][j] + aD[a][1] * vf.Tv[1][j] + aD[a][2] * vf.Tv[2][j];
      g.Rv[a][j] = r.v;
      g.dRv[0][a][j] = r.d[0];
      g.dRv[1][a][j] = r.d[1];
    }
  }
  return g;
}

inline SurfaceGeometry<double> build_geometry(const Chart& chart, Vec2d xi) {
  return build_geometry<double>(chart, Vec2<double>{xi[0], xi[1]});
}

/// Geometry whose fields carry their own first partials (needed by the
/// divergence terms of the strong form).
inline SurfaceGeometry<ad::Dual1> build_geometry_jet(const Chart& chart, Vec2d xi) {
  return build_geometry<ad::Dual1>(chart, Vec2<ad::Dual1>{ad::seed(xi[0], 0), ad::seed(xi[1], 1)});
}

/// Local displacement and rotation transforms: u_i = a_i . u_hat, theta_a = a_a . theta_hat.
template <class T>
std::pair<Mat3<T>, std::array<Vec3<T>, 2>> frame_transforms(const SurfaceGeometry<T>& g) {
  return {g.Tu, g.Ttheta};
}

struct BoundarySample {
  Vec2d xi{};
  Vec2d ref_normal{};  // outward unit normal of the reference domain
  Vec2d nu_cov{};      // nu_a, with nu^a nu_a = 1
  Vec2d nu_con{};      // nu^a = a^{ab} nu_b
  Edge edge = Edge::xi1_min;
};

/// Outward unit normal of omega at a point on `edge`.
inline Vec2d reference_normal(const RefDomain& dom, Vec2d xi, Edge edge) {
  constexpr double tol = 1e-9;
  const auto fail = [&](const std::string& why) {
    return GeometryError("boundary point " + detail::point_str(xi[0], xi[1]) + " on edge " +
                         std::string(to_string(edge)) + ": " + why);
  };
  if (dom.kind == DomainKind::disc) {
    if (edge != Edge::circle) throw fail("disc domains only have the circle edge");
    const double r = std::hypot(xi[0], xi[1]);
    if (std::abs(r - dom.radius) > tol * std::max(1.0, dom.radius)) throw fail("not on the rim");
    return {xi[0] / r, xi[1] / r};
  }
  const bool on1lo = std::abs(xi[0] - dom.lo1) <= tol;
  const bool on1hi = std::abs(xi[0] - dom.hi1) <= tol;
  const bool on2lo = std::abs(xi[1] - dom.lo2) <= tol;
  const bool on2hi = std::abs(xi[1] - dom.hi2) <= tol;
  if ((on1lo || on1hi) && (on2lo || on2hi)) throw fail("corner point has no unique normal");
  switch (edge) {
    case Edge::xi1_min:
      if (!on1lo) break;
      return {-1.0, 0.0};
    case Edge::xi1_max:
      if (!on1hi) break;
      return {1.0, 0.0};
    case Edge::xi2_min:
      if (!on2lo) break;
      return {0.0, -1.0};
    case Edge::xi2_max:
      if (!on2hi) break;
      return {0.0, 1.0};
    case Edge::circle:
      throw fail("rectangular domains have no circle edge");
  }
  throw fail("point is not on this edge");
}

/// Conormal of the surface boundary: the reference normal taken as covariant
/// components and normalised under the inverse metric.
inline BoundarySample boundary_normal(const Chart& chart, Vec2d xi, Edge edge) {
  BoundarySample s;
  s.xi = xi;
  s.edge = edge;
  s.ref_normal = reference_normal(chart.domain(), xi, edge);
  const SurfaceGeometry<double> g = build_geometry(chart, xi);
  const Vec2d& N = s.ref_normal;
  double q = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) q += N[a] * g.a_con[a][b] * N[b];
  const double inv = 1.0 / std::sqrt(q);
  s.nu_cov = {N[0] * inv, N[1] * inv};
  for (int a = 0; a < 2; ++a) s.nu_con[a] = g.a_con[a][0] * s.nu_cov[0] + g.a_con[a][1] * s.nu_cov[1];
  return s;
}

/// Geometry at every point, positionally.
inline std::vector<SurfaceGeometry<double>> precompute_geometry(const Chart& chart,
                                                                const std::vector<Vec2d>& points) {
  std::vector<SurfaceGeometry<double>> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(build_geometry(chart, p));
  return out;
}

inline std::vector<SurfaceGeometry<ad::Dual1>> precompute_geometry_jet(
    const Chart& chart, const std::vector<Vec2d>& points) {
  std::vector<SurfaceGeometry<ad::Dual1>> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(build_geometry_jet(chart, p));
  return out;
}

}  // namespace shellpinn
