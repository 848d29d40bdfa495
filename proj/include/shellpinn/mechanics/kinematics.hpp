#pragma once

#include <array>
#include <string_view>

#include "shellpinn/errors.hpp"
#include "shellpinn/geometry/geometry.hpp"
#include "shellpinn/small_tensor.hpp"

namespace shellpinn {

/// Which basis the two rotation outputs of the network are expressed in.
enum class RotationBasis { covariant, vframe };

inline std::string_view to_string(RotationBasis b) {
  return b == RotationBasis::covariant ? "covariant" : "vframe";
}

inline RotationBasis rotation_basis_from_string(std::string_view s) {
  if (s == "covariant") return RotationBasis::covariant;
  if (s == "vframe") return RotationBasis::vframe;
  throw ConfigError("rotation_basis", "expected 'covariant' or 'vframe', got '" + std::string(s) + "'");
}

/// Network outputs at one point: global displacement and raw rotations with
/// their first partials. Second partials are carried by choosing S = Dual<...>,
/// whose derivative parts are then the partials of every field.
template <class S>
struct FieldJet {
  Vec3<S> u_hat;
  std::array<Vec2<S>, 3> du_hat;  // du_hat[i][b] = d u_hat_i / d xi^b
  Vec2<S> rot;
  std::array<Vec2<S>, 2> drot;
};

/// Covariant surface fields.
template <class S>
struct LocalFields {
  Vec3<S> u;                   // (u_1, u_2, u_3)
  std::array<Vec2<S>, 3> du;   // du[i][b] = d u_i / d xi^b
  Vec2<S> theta;               // (theta_1, theta_2)
  std::array<Vec2<S>, 2> dtheta;
};

template <class S>
struct Strains {
  Mat2<S> e;
  Mat2<S> k;
  Vec2<S> gamma;
};

template <class S>
LocalFields<S> to_local(const FieldJet<S>& f, const SurfaceGeometry<S>& g, RotationBasis basis) {
  LocalFields<S> l;
  for (int i = 0; i < 3; ++i) {
    l.u[i] = dot(g.Tu[i], f.u_hat);
    for (int b = 0; b < 2; ++b) {
      const Vec3<S> dub{f.du_hat[0][b], f.du_hat[1][b], f.du_hat[2][b]};
      l.du[i][b] = dot(g.dTu[b][i], f.u_hat) + dot(g.Tu[i], dub);
    }
  }
  if (basis == RotationBasis::covariant) {
    l.theta = f.rot;
    l.dtheta = f.drot;
    return l;
  }
  for (int a = 0; a < 2; ++a) {
    l.theta[a] = g.Rv[a][0] * f.rot[0] + g.Rv[a][1] * f.rot[1];
    for (int b = 0; b < 2; ++b) {
      l.dtheta[a][b] = g.dRv[b][a][0] * f.rot[0] + g.dRv[b][a][1] * f.rot[1] +
                       g.Rv[a][0] * f.drot[0][b] + g.Rv[a][1] * f.drot[1][b];
    }
  }
  return l;
}

/// v_{a|b} = v_{a,b} - Gamma^r_{ab} v_r for a covariant surface vector.
template <class S>
Mat2<S> covariant_derivative(const Vec2<S>& v, const std::array<Vec2<S>, 2>& dv,
                             const std::array<Mat2<S>, 2>& gamma) {
  Mat2<S> out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out[a][b] = dv[a][b] - gamma[0][a][b] * v[0] - gamma[1][a][b] * v[1];
  return out;
}

namespace detail {
/// Symmetric part of b^l_b X_{l a} over (a, b): 1/2 (b^l_b X_{la} + b^l_a X_{lb}).
template <class S>
Mat2<S> sym_b_contract(const Mat2<S>& b_mix, const Mat2<S>& X) {
  Mat2<S> out;
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b) {
      out[a][b] = 0.5 * (b_mix[0][b] * X[0][a] + b_mix[1][b] * X[1][a] + b_mix[0][a] * X[0][b] +
                         b_mix[1][a] * X[1][b]);
      out[b][a] = out[a][b];
    }
  return out;
}
}  // namespace detail

template <class S>
Strains<S> strains(const LocalFields<S>& l, const SurfaceGeometry<S>& g) {
  const Vec2<S> u_t{l.u[0], l.u[1]};
  const std::array<Vec2<S>, 2> du_t{l.du[0], l.du[1]};
  const Mat2<S> uab = covariant_derivative(u_t, du_t, g.gamma);
  const Mat2<S> tab = covariant_derivative(l.theta, l.dtheta, g.gamma);
  const Mat2<S> bu = detail::sym_b_contract(g.b_mix, uab);

  Strains<S> s;
  for (int a = 0; a < 2; ++a) {
    for (int b = a; b < 2; ++b) {
      s.e[a][b] = 0.5 * (uab[a][b] + uab[b][a]) - g.b_cov[a][b] * l.u[2];
      s.k[a][b] = 0.5 * (tab[a][b] + tab[b][a]) - bu[a][b] + g.c_cov[a][b] * l.u[2];
      s.e[b][a] = s.e[a][b];
      s.k[b][a] = s.k[a][b];
    }
    s.gamma[a] = l.theta[a] + l.du[2][a] + g.b_mix[0][a] * l.u[0] + g.b_mix[1][a] * l.u[1];
  }
  return s;
}

/// Linearised Green-Lagrange strain of the shell body at height xi3 above the
/// midsurface, including the term quadratic in xi3 that the shell model drops.
template <class S>
Mat3<S> green_lagrange_expansion(const LocalFields<S>& l, const SurfaceGeometry<S>& g, double xi3) {
  const Strains<S> s = strains(l, g);
  const Mat2<S> tab = covariant_derivative(l.theta, l.dtheta, g.gamma);
  const Mat2<S> quad = detail::sym_b_contract(g.b_mix, tab);
  Mat3<S> E;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) E[a][b] = s.e[a][b] + xi3 * s.k[a][b] - (xi3 * xi3) * quad[a][b];
    E[a][2] = 0.5 * s.gamma[a];
    E[2][a] = E[a][2];
  }
  E[2][2] = S(0.0);
  return E;
}

}  // namespace shellpinn
