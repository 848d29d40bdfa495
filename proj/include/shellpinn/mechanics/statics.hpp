#pragma once

#include <array>

#include "shellpinn/autodiff/dual.hpp"
#include "shellpinn/geometry/geometry.hpp"
#include "shellpinn/mechanics/constitutive.hpp"

namespace shellpinn {

/// a^a_{|a} for a contravariant vector whose components carry their xi-partials.
template <class S>
S covariant_divergence(const Vec2<ad::Dual<S>>& a, const std::array<Mat2<S>, 2>& gamma) {
  S out = a[0].d[0] + a[1].d[1];
  for (int al = 0; al < 2; ++al)
    for (int r = 0; r < 2; ++r) out = out + gamma[al][al][r] * a[r].v;
  return out;
}

/// B^{ab}_{|b} for a contravariant 2-tensor whose components carry their xi-partials.
template <class S>
Vec2<S> covariant_divergence(const Mat2<ad::Dual<S>>& B, const std::array<Mat2<S>, 2>& gamma) {
  Vec2<S> out;
  for (int a = 0; a < 2; ++a) {
    S v = B[a][0].d[0] + B[a][1].d[1];
    for (int b = 0; b < 2; ++b)
      for (int r = 0; r < 2; ++r)
        v = v + gamma[a][b][r] * B[r][b].v + gamma[b][b][r] * B[a][r].v;
    out[a] = v;
  }
  return out;
}

/// (b.M)^{lb} = b^l_a M^{ab}.
template <class S>
Mat2<S> b_dot(const Mat2<S>& b_mix, const Mat2<S>& M) {
  Mat2<S> out;
  for (int l = 0; l < 2; ++l)
    for (int b = 0; b < 2; ++b) out[l][b] = b_mix[l][0] * M[0][b] + b_mix[l][1] * M[1][b];
  return out;
}

/// Effective membrane resultant n - b.m.
template <class S>
Mat2<S> effective_membrane(const Resultants<S>& r, const Mat2<S>& b_mix) {
  const Mat2<S> bm = b_dot(b_mix, r.m);
  Mat2<S> out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out[a][b] = r.n[a][b] - bm[a][b];
  return out;
}

template <class S>
struct StrongResiduals {
  Vec2<S> r_moment;   // div m - q
  Vec2<S> r_tangent;  // div(n - b.m) - b.q + f
  S r_normal;         // div q + b:(n - b.m) + f3

  std::array<S, 5> components() const {
    return {r_moment[0], r_moment[1], r_tangent[0], r_tangent[1], r_normal};
  }
};

/// Load in the local frame: contravariant tangential part f^a and normal part f3.
template <class S>
struct LocalLoad {
  Vec2<S> f;
  S f3;
};

/// Decomposes a load per unit area given in global coordinates.
template <class S, class T>
LocalLoad<S> global_load_to_local(const SurfaceGeometry<T>& g, const Vec3<S>& F) {
  LocalLoad<S> out;
  Vec2<S> f_cov;
  for (int a = 0; a < 2; ++a) {
    const Vec3<T>& aa = a == 0 ? g.a1 : g.a2;
    f_cov[a] = ad::value_of(aa[0]) * F[0] + ad::value_of(aa[1]) * F[1] + ad::value_of(aa[2]) * F[2];
  }
  for (int a = 0; a < 2; ++a)
    out.f[a] = ad::value_of(g.a_con[a][0]) * f_cov[0] + ad::value_of(g.a_con[a][1]) * f_cov[1];
  out.f3 = ad::value_of(g.a3[0]) * F[0] + ad::value_of(g.a3[1]) * F[1] + ad::value_of(g.a3[2]) * F[2];
  return out;
}

/// Equilibrium residuals from resultants carrying their xi-partials, with the
/// geometry likewise differentiated.
template <class S>
StrongResiduals<S> strong_residuals(const Resultants<ad::Dual<S>>& r,
                                    const SurfaceGeometry<ad::Dual<S>>& g, const LocalLoad<S>& load) {
  std::array<Mat2<S>, 2> gamma;
  Mat2<S> b_mix, b_cov;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      b_mix[i][j] = g.b_mix[i][j].v;
      b_cov[i][j] = g.b_cov[i][j].v;
      for (int k = 0; k < 2; ++k) gamma[i][j][k] = g.gamma[i][j][k].v;
    }
  const Mat2<ad::Dual<S>> X = effective_membrane(r, g.b_mix);
  const Vec2<S> div_m = covariant_divergence(r.m, gamma);
  const Vec2<S> div_X = covariant_divergence(X, gamma);
  const S div_q = covariant_divergence(r.q, gamma);

  StrongResiduals<S> out;
  for (int a = 0; a < 2; ++a) {
    out.r_moment[a] = div_m[a] - r.q[a].v;
    const S bq = b_mix[a][0] * r.q[0].v + b_mix[a][1] * r.q[1].v;
    out.r_tangent[a] = div_X[a] - bq + load.f[a];
  }
  S bX = S(0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) bX = bX + b_cov[a][b] * X[b][a].v;
  out.r_normal = div_q + bX + load.f3;
  return out;
}

/// m.nu, (n - b.m).nu, q.nu on the boundary, with nu in covariant components.
template <class S>
std::array<S, 5> natural_bc_residuals(const Resultants<S>& r, const Mat2<S>& b_mix,
                                      const Vec2d& nu_cov) {
  const Mat2<S> X = effective_membrane(r, b_mix);
  std::array<S, 5> out;
  for (int a = 0; a < 2; ++a) {
    out[a] = r.m[a][0] * nu_cov[0] + r.m[a][1] * nu_cov[1];
    out[2 + a] = X[a][0] * nu_cov[0] + X[a][1] * nu_cov[1];
  }
  out[4] = r.q[0] * nu_cov[0] + r.q[1] * nu_cov[1];
  return out;
}

}  // namespace shellpinn
