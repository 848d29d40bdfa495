#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shellpinn/mechanics/kinematics.hpp"
#include "support/closed_form_charts.hpp"
#include "support/fields.hpp"

using namespace shellpinn;
using shellpinn::testing::field_jet;

namespace {

using V3 = std::array<double, 3>;

double d3(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// A smooth, non-trivial five-component field.
auto smooth_field = [](auto x, auto y) {
  using S = decltype(x);
  using ad::sin, ad::cos;
  return std::array<S, 5>{0.3 + 0.2 * x * y - 0.1 * y * y, sin(x) * 0.4 + 0.05 * y,
                          0.2 * x * x - 0.3 * y + cos(y) * 0.1, 0.1 * x + 0.25 * y * y,
                          -0.15 * x * y + 0.05};
};

std::vector<Chart> curved_charts() {
  return {Chart::hyperbolic_paraboloid(), Chart::scordelis_lo(), Chart::hemisphere(),
          Chart::hyperbolic_paraboloid(2.0, 0.4), Chart::scordelis_lo(2.0, 1.2, 0.7)};
}

Vec2d random_point(const Chart& c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  const RefDomain d = c.domain();
  if (d.kind == DomainKind::disc) return {u(rng) * d.radius, u(rng) * d.radius};
  return {0.5 * (d.lo1 + d.hi1) + u(rng) * (d.hi1 - d.lo1),
          0.5 * (d.lo2 + d.hi2) + u(rng) * (d.hi2 - d.lo2)};
}

}  // namespace

TEST(ToLocal, FlatPlateConstant) {
  const auto g = build_geometry(Chart::flat_plate(), {0.1, 0.2});
  FieldJet<double> f{};
  f.u_hat = {0.3, 0.0, 0.0};
  const auto l = to_local(f, g, RotationBasis::covariant);
  EXPECT_DOUBLE_EQ(l.u[0], 0.3);
  EXPECT_DOUBLE_EQ(l.u[1], 0.0);
  EXPECT_DOUBLE_EQ(l.u[2], 0.0);
  for (const auto& r : l.du) {
    EXPECT_EQ(r[0], 0.0);
    EXPECT_EQ(r[1], 0.0);
  }
}

TEST(ToLocal, ScordelisExample) {
  const auto g = build_geometry(Chart::scordelis_lo(), {0.0, 0.0});
  FieldJet<double> f{};
  f.u_hat = {0.0, 1.0, 0.0};
  const auto l = to_local(f, g, RotationBasis::covariant);
  EXPECT_NEAR(l.u[0], 0.0, 1e-15);
  EXPECT_NEAR(l.u[1], 0.5, 1e-15);
  EXPECT_NEAR(l.u[2], 0.0, 1e-15);
}

TEST(ToLocal, ConstantVectorIsRecovered) {
  std::mt19937_64 rng(1);
  const V3 c{0.3, -0.7, 1.1};
  for (const auto& ch : curved_charts()) {
    for (int n = 0; n < 20; ++n) {
      const auto g = build_geometry(ch, random_point(ch, rng));
      FieldJet<double> f{};
      f.u_hat = c;
      const auto l = to_local(f, g, RotationBasis::covariant);
      // u = u_a a^a + u_3 a_3 with a^a = a^{ab} a_b.
      for (int k = 0; k < 3; ++k) {
        double v = l.u[2] * g.a3[k];
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) v += l.u[a] * g.a_con[a][b] * (b == 0 ? g.a1[k] : g.a2[k]);
        EXPECT_NEAR(v, c[k], 1e-12);
      }
    }
  }
}

TEST(ToLocal, ChainRuleMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  const double h = 1e-6;
  for (const auto& ch : curved_charts()) {
    for (auto basis : {RotationBasis::covariant, RotationBasis::vframe}) {
      for (int n = 0; n < 10; ++n) {
        const Vec2d xi = random_point(ch, rng);
        const auto l = to_local(field_jet(smooth_field, xi), build_geometry(ch, xi), basis);
        for (int b = 0; b < 2; ++b) {
          Vec2d xp = xi, xm = xi;
          xp[b] += h;
          xm[b] -= h;
          const auto lp = to_local(field_jet(smooth_field, xp), build_geometry(ch, xp), basis);
          const auto lm = to_local(field_jet(smooth_field, xm), build_geometry(ch, xm), basis);
          for (int i = 0; i < 3; ++i) {
            const double fd = (lp.u[i] - lm.u[i]) / (2 * h);
            EXPECT_NEAR(l.du[i][b], fd, 1e-6 * std::max(1.0, std::abs(fd)));
          }
          for (int a = 0; a < 2; ++a) {
            const double fd = (lp.theta[a] - lm.theta[a]) / (2 * h);
            EXPECT_NEAR(l.dtheta[a][b], fd, 1e-6 * std::max(1.0, std::abs(fd)));
          }
        }
      }
    }
  }
}

TEST(ToLocal, VFrameRotationsMapThroughTangentVectors) {
  const Chart ch = Chart::hyperbolic_paraboloid();
  const Vec2d xi{0.2, -0.1};
  const auto g = build_geometry(ch, xi);
  FieldJet<double> f{};
  f.rot = {0.4, -0.3};
  const auto l = to_local(f, g, RotationBasis::vframe);
  V3 th{};
  for (int k = 0; k < 3; ++k) th[k] = g.Tv[k][0] * f.rot[0] + g.Tv[k][1] * f.rot[1];
  EXPECT_NEAR(l.theta[0], d3(g.a1, th), 1e-14);
  EXPECT_NEAR(l.theta[1], d3(g.a2, th), 1e-14);
}

TEST(CovariantDerivative, FlatPlate) {
  const auto g = build_geometry(Chart::flat_plate(), {0.0, 0.0});
  const Vec2<double> v{0.4, -1.0};
  const std::array<Vec2<double>, 2> dv{{{1.0, 2.0}, {3.0, 4.0}}};
  const auto r = covariant_derivative(v, dv, g.gamma);
  EXPECT_EQ(r[0][1], 2.0);
  EXPECT_EQ(r[1][0], 3.0);
  const auto z = covariant_derivative(v, {}, g.gamma);
  for (const auto& row : z) EXPECT_EQ(row[0] + row[1], 0.0);
}

TEST(CovariantDerivative, SphereNearApexUsesChristoffels) {
  const Chart ch = Chart::hemisphere();
  const double x = 0.1, y = -0.05;
  const auto g = build_geometry(ch, {x, y});
  // Symbolic Christoffels of z = sqrt(1 - x^2 - y^2): Gamma^r_ab = x_r * (-z_ab)/z ... in
  // Monge form, Gamma^r_ab = z_r z_ab / (1 + |grad z|^2).
  const auto p = shellpinn::testing::closed_form_partials(ch, x, y);
  const double zx = p.a1[2], zy = p.a2[2];
  const double zab[2][2] = {{p.p11[2], p.p12[2]}, {p.p12[2], p.p22[2]}};
  const double zr[2] = {zx, zy};
  const double w = 1.0 + zx * zx + zy * zy;
  const Vec2<double> v{0.7, -0.2};
  const auto r = covariant_derivative(v, {}, g.gamma);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double G0 = zr[0] * zab[a][b] / w, G1 = zr[1] * zab[a][b] / w;
      EXPECT_NEAR(r[a][b], -(G0 * v[0] + G1 * v[1]), 1e-12);
    }
}

TEST(Strains, ZeroFields) {
  const auto g = build_geometry(Chart::scordelis_lo(), {0.1, 0.2});
  const auto s = strains(to_local(FieldJet<double>{}, g, RotationBasis::covariant), g);
  for (int a = 0; a < 2; ++a) {
    EXPECT_EQ(s.gamma[a], 0.0);
    for (int b = 0; b < 2; ++b) {
      EXPECT_EQ(s.e[a][b], 0.0);
      EXPECT_EQ(s.k[a][b], 0.0);
    }
  }
}

TEST(Strains, RigidTranslationIsStrainFree) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 100; ++n) {
    Chart ch;
    switch (n % 3) {
      case 0: ch = Chart::hyperbolic_paraboloid(1.0, 0.2 + std::abs(u(rng))); break;
      case 1: ch = Chart::scordelis_lo(1.0, 0.3 + std::abs(u(rng)), 0.7); break;
      default: ch = Chart::hemisphere(0.8 + 0.5 * std::abs(u(rng))); break;
    }
    const auto g = build_geometry(ch, random_point(ch, rng));
    FieldJet<double> f{};
    f.u_hat = {u(rng), u(rng), u(rng)};
    const auto s = strains(to_local(f, g, RotationBasis::covariant), g);
    double total = std::abs(s.gamma[0]) + std::abs(s.gamma[1]);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) total += std::abs(s.e[a][b]) + std::abs(s.k[a][b]);
    EXPECT_LE(total, 1e-10);
  }
}

TEST(Strains, FlatPlateTransverseSlope) {
  auto field = [](auto x, auto y) {
    using S = decltype(x);
    return std::array<S, 5>{S(0.0), S(0.0), x, S(0.0), S(0.0 * y)};
  };
  const auto g = build_geometry(Chart::flat_plate(), {0.2, 0.1});
  const auto s = strains(to_local(field_jet(field, {0.2, 0.1}), g, RotationBasis::covariant), g);
  EXPECT_DOUBLE_EQ(s.gamma[0], 1.0);
  EXPECT_DOUBLE_EQ(s.gamma[1], 0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      EXPECT_DOUBLE_EQ(s.e[a][b], 0.0);
      EXPECT_DOUBLE_EQ(s.k[a][b], 0.0);
    }
}

TEST(Strains, Symmetric) {
  std::mt19937_64 rng(6);
  for (const auto& ch : curved_charts()) {
    const Vec2d xi = random_point(ch, rng);
    const auto g = build_geometry(ch, xi);
    const auto s = strains(to_local(field_jet(smooth_field, xi), g, RotationBasis::covariant), g);
    EXPECT_EQ(s.e[0][1], s.e[1][0]);
    EXPECT_EQ(s.k[0][1], s.k[1][0]);
  }
}

namespace {

/// Linearised Green-Lagrange strain from its 3-D definition, by finite
/// differences of the body map and of the displacement field.
Mat3<double> green_lagrange_3d(const Chart& ch, Vec2d xi, double xi3) {
  auto body = [&](double x1, double x2, double x3) {
    const auto g = build_geometry(ch, {x1, x2});
    const V3 phi = ch.map<double>(x1, x2);
    V3 X{}, U{};
    const auto o = smooth_field(x1, x2);
    for (int k = 0; k < 3; ++k) {
      X[k] = phi[k] + x3 * g.a3[k];
      double th = 0.0;
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) th += o[3 + l] * g.a_con[l][m] * (m == 0 ? g.a1[k] : g.a2[k]);
      U[k] = o[k] + x3 * th;
    }
    return std::pair{X, U};
  };
  const double h = 1e-5;
  std::array<V3, 3> gi{}, dU{};
  for (int i = 0; i < 3; ++i) {
    double p[3] = {xi[0], xi[1], xi3}, m[3] = {xi[0], xi[1], xi3};
    p[i] += h;
    m[i] -= h;
    const auto [Xp, Up] = body(p[0], p[1], p[2]);
    const auto [Xm, Um] = body(m[0], m[1], m[2]);
    for (int k = 0; k < 3; ++k) {
      gi[i][k] = (Xp[k] - Xm[k]) / (2 * h);
      dU[i][k] = (Up[k] - Um[k]) / (2 * h);
    }
  }
  Mat3<double> E{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) E[i][j] = 0.5 * (d3(gi[i], dU[j]) + d3(gi[j], dU[i]));
  return E;
}

}  // namespace

TEST(GreenLagrange, MidsurfaceValues) {
  const Chart ch = Chart::scordelis_lo();
  const Vec2d xi{0.1, 0.2};
  const auto g = build_geometry(ch, xi);
  const auto l = to_local(field_jet(smooth_field, xi), g, RotationBasis::covariant);
  const auto s = strains(l, g);
  const auto E = green_lagrange_expansion(l, g, 0.0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) EXPECT_EQ(E[a][b], s.e[a][b]);
    EXPECT_EQ(E[a][2], 0.5 * s.gamma[a]);
  }
  EXPECT_EQ(E[2][2], 0.0);
}

TEST(GreenLagrange, LinearCoefficientIsBendingStrainOnPlate) {
  const Chart ch = Chart::flat_plate();
  const Vec2d xi{-0.2, 0.3};
  const auto g = build_geometry(ch, xi);
  const auto l = to_local(field_jet(smooth_field, xi), g, RotationBasis::covariant);
  const auto s = strains(l, g);
  const double h = 0.01;
  const auto Ep = green_lagrange_expansion(l, g, h), Em = green_lagrange_expansion(l, g, -h);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      EXPECT_NEAR((Ep[a][b] - Em[a][b]) / (2 * h), s.k[a][b], 1e-12);
      EXPECT_NEAR(Ep[a][b] + Em[a][b], 2 * s.e[a][b], 1e-15);
    }
  EXPECT_EQ(Ep[2][2], 0.0);
}

TEST(GreenLagrange, MatchesThreeDimensionalDefinition) {
  std::mt19937_64 rng(8);
  for (const auto& ch : curved_charts()) {
    for (double xi3 : {-0.2, 0.0, 0.15}) {
      const Vec2d xi = random_point(ch, rng);
      const auto g = build_geometry(ch, xi);
      const auto l = to_local(field_jet(smooth_field, xi), g, RotationBasis::covariant);
      const auto E = green_lagrange_expansion(l, g, xi3);
      const auto E3 = green_lagrange_3d(ch, xi, xi3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(E[i][j], E3[i][j], 1e-7) << i << j;
      // The quadratic term must be large enough for the comparison to pin its sign.
      const auto Ep = green_lagrange_expansion(l, g, 0.2);
      const auto Em = green_lagrange_expansion(l, g, -0.2);
      const auto E0 = green_lagrange_expansion(l, g, 0.0);
      double quad = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) quad += std::abs(Ep[a][b] + Em[a][b] - 2 * E0[a][b]);
      EXPECT_GT(quad, 1e-4);
    }
  }
}

TEST(GreenLagrange, ShearComponentIsHalfGamma) {
  std::mt19937_64 rng(10);
  for (const auto& ch : curved_charts()) {
    const Vec2d xi = random_point(ch, rng);
    const auto g = build_geometry(ch, xi);
    const auto l = to_local(field_jet(smooth_field, xi), g, RotationBasis::vframe);
    const auto s = strains(l, g);
    const auto E = green_lagrange_expansion(l, g, 0.07);
    EXPECT_EQ(E[0][2], 0.5 * s.gamma[0]);
    EXPECT_EQ(E[1][2], 0.5 * s.gamma[1]);
    EXPECT_EQ(E[2][2], 0.0);
  }
}
