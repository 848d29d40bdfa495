#pragma once

#include <cmath>
#include <string>

#include "shellpinn/errors.hpp"
#include "shellpinn/mechanics/kinematics.hpp"
#include "shellpinn/small_tensor.hpp"

namespace shellpinn {

struct Lame {
  double lambda;
  double mu;
};

inline Lame lame(double E, double nu) {
  if (!(E > 0.0)) throw ConfigError("E", "Young's modulus must be positive, got " + std::to_string(E));
  if (!(nu > -1.0 && nu < 0.5)) {
    throw ConfigError("nu", "Poisson ratio must lie in (-1, 0.5), got " + std::to_string(nu));
  }
  return {E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), E / (2.0 * (1.0 + nu))};
}

/// Isotropic linear elastic shell material. Thickness is given separately
/// where it may vary per point.
struct Material {
  double E = 1.0;
  double nu = 0.3;
  double kappa = 5.0 / 6.0;
  double t = 0.1;

  Lame moduli() const { return lame(E, nu); }
  /// Plane-stress coefficient 2 lambda mu / (lambda + 2 mu).
  double plane_stress_lambda() const {
    const Lame l = moduli();
    return 2.0 * l.lambda * l.mu / (l.lambda + 2.0 * l.mu);
  }
  void validate() const {
    moduli();
    if (!(kappa > 0.0)) throw ConfigError("kappa", "shear correction must be positive");
    if (!(t > 0.0)) throw ConfigError("t", "thickness must be positive");
  }
};

template <class S>
struct ElasticityTensors {
  Tensor4<S> C;  // C^{ab sr}
  Mat2<S> D;     // D^{ab}
};

template <class S>
ElasticityTensors<S> elasticity_tensors(const Mat2<S>& a_con, double lambda, double mu) {
  const double c0 = 2.0 * lambda * mu / (lambda + 2.0 * mu);
  ElasticityTensors<S> T;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      for (int s = 0; s < 2; ++s)
        for (int r = 0; r < 2; ++r)
          T.C[a][b][s][r] = c0 * a_con[a][b] * a_con[s][r] +
                            mu * (a_con[a][s] * a_con[b][r] + a_con[a][r] * a_con[b][s]);
      T.D[a][b] = mu * a_con[a][b];
    }
  return T;
}

/// (C:e)^{ab} = C^{ab sr} e_{sr}.
template <class S>
Mat2<S> contract(const Tensor4<S>& C, const Mat2<S>& e) {
  Mat2<S> out;
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b) {
      out[a][b] = C[a][b][0][0] * e[0][0] + C[a][b][1][1] * e[1][1] +
                  (C[a][b][0][1] + C[a][b][1][0]) * e[0][1];
      out[b][a] = out[a][b];
    }
  return out;
}

/// A:B = A^{ab} B_{ba}.
template <class S>
S double_dot(const Mat2<S>& A, const Mat2<S>& B) {
  return A[0][0] * B[0][0] + A[0][1] * B[1][0] + A[1][0] * B[0][1] + A[1][1] * B[1][1];
}

template <class S>
Vec2<S> mat_vec(const Mat2<S>& M, const Vec2<S>& v) {
  return {M[0][0] * v[0] + M[0][1] * v[1], M[1][0] * v[0] + M[1][1] * v[1]};
}

template <class S>
S dot2(const Vec2<S>& a, const Vec2<S>& b) {
  return a[0] * b[0] + a[1] * b[1];
}

/// Contravariant stress resultants.
template <class S>
struct Resultants {
  Mat2<S> n;
  Mat2<S> m;
  Vec2<S> q;
};

/// n = t C:e, m = t^3/12 C:k, q = kappa t D.gamma.
template <class S>
Resultants<S> resultants(const Strains<S>& s, const ElasticityTensors<S>& T, const S& t,
                         double kappa) {
  Resultants<S> r;
  const Mat2<S> Ce = contract(T.C, s.e);
  const Mat2<S> Ck = contract(T.C, s.k);
  const Vec2<S> Dg = mat_vec(T.D, s.gamma);
  const S bend = t * t * t * (1.0 / 12.0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      r.n[a][b] = t * Ce[a][b];
      r.m[a][b] = bend * Ck[a][b];
    }
    r.q[a] = (kappa * t) * Dg[a];
  }
  return r;
}

template <class S>
struct EnergyDensities {
  S membrane, bending, shear, external;
  S internal() const { return membrane + bending + shear; }
};

template <class S>
EnergyDensities<S> energy_densities(const Strains<S>& s, const ElasticityTensors<S>& T, const S& t,
                                    double kappa, const S& w_ext) {
  const S eCe = double_dot(contract(T.C, s.e), s.e);
  const S kCk = double_dot(contract(T.C, s.k), s.k);
  const S gDg = dot2(mat_vec(T.D, s.gamma), s.gamma);
  return {0.5 * t * eCe, (0.5 / 12.0) * (t * t * t) * kCk, (0.5 * kappa) * t * gDg, w_ext};
}

}  // namespace shellpinn
