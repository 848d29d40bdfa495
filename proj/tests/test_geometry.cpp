#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "shellpinn/geometry/geometry.hpp"
#include "support/closed_form_charts.hpp"

using namespace shellpinn;
using shellpinn::testing::closed_form_partials;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Chart> builtin_charts() {
  return {Chart::flat_plate(), Chart::hyperbolic_paraboloid(), Chart::scordelis_lo(),
          Chart::hemisphere(), Chart::hyperbolic_paraboloid(2.0, 0.3),
          Chart::scordelis_lo(3.0, 1.5, 0.6)};
}

Vec2d random_interior(const Chart& c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const RefDomain d = c.domain();
  if (d.kind == DomainKind::disc) {
    const double r = 0.98 * d.radius * std::sqrt(u(rng)), t = 2 * kPi * u(rng);
    return {r * std::cos(t), r * std::sin(t)};
  }
  return {d.lo1 + (d.hi1 - d.lo1) * u(rng), d.lo2 + (d.hi2 - d.lo2) * u(rng)};
}

double d3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

}  // namespace

TEST(BuildGeometry, FlatPlate) {
  const auto g = build_geometry(Chart::flat_plate(), {0.1, -0.2});
  EXPECT_DOUBLE_EQ(g.sqrt_a, 1.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      EXPECT_DOUBLE_EQ(g.a_cov[a][b], a == b ? 1.0 : 0.0);
      EXPECT_DOUBLE_EQ(g.b_cov[a][b], 0.0);
      EXPECT_DOUBLE_EQ(g.gamma[0][a][b], 0.0);
      EXPECT_DOUBLE_EQ(g.gamma[1][a][b], 0.0);
    }
  const auto [Tu, Tt] = frame_transforms(g);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(Tu[i][j], i == j ? 1.0 : 0.0);
}

TEST(BuildGeometry, ScordelisAtOrigin) {
  const auto g = build_geometry(Chart::scordelis_lo(), {0.0, 0.0});
  const std::array<double, 3> e1{1, 0, 0}, a2{0, 0.5, 0}, e3{0, 0, 1};
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(g.a1[k], e1[k], 1e-15);
    EXPECT_NEAR(g.a2[k], a2[k], 1e-15);
    EXPECT_NEAR(g.a3[k], e3[k], 1e-15);
    EXPECT_NEAR(g.Tu[0][k], e1[k], 1e-15);
    EXPECT_NEAR(g.Tu[1][k], a2[k], 1e-15);
    EXPECT_NEAR(g.Tu[2][k], e3[k], 1e-15);
  }
  EXPECT_NEAR(g.a_cov[0][0], 1.0, 1e-15);
  EXPECT_NEAR(g.a_cov[1][1], 0.25, 1e-15);
  EXPECT_NEAR(g.a_cov[0][1], 0.0, 1e-15);
  EXPECT_NEAR(g.sqrt_a, 0.5, 1e-15);
  EXPECT_NEAR(g.b_cov[0][0], 0.0, 1e-15);
  EXPECT_NEAR(g.b_cov[1][1], -0.5, 1e-15);
  EXPECT_NEAR(g.b_mix[0][0], 0.0, 1e-15);
  EXPECT_NEAR(g.b_mix[1][1], -2.0, 1e-14);
}

TEST(BuildGeometry, HemisphereApex) {
  const auto g = build_geometry(Chart::hemisphere(), {0.0, 0.0});
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(g.a1[k], k == 0 ? 1.0 : 0.0, 1e-15);
    EXPECT_NEAR(g.a2[k], k == 1 ? 1.0 : 0.0, 1e-15);
    EXPECT_NEAR(g.a3[k], k == 2 ? 1.0 : 0.0, 1e-15);
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) EXPECT_NEAR(g.b_cov[a][b], a == b ? -1.0 : 0.0, 1e-15);
}

TEST(BuildGeometry, DegenerateBasisNamesThePoint) {
  // The hemisphere chart is not immersive on the rim; the error must name the point
  // (either as a geometry error or as the sqrt domain error from the chart).
  try {
    build_geometry(Chart::hemisphere(), {1.0, 0.0});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == "geometry" || e.kind() == "evaluation");
  }
  Chart squashed = Chart::hyperbolic_paraboloid();
  squashed.kind = ChartKind::scordelis_lo;
  squashed.radius = 0.0;
  try {
    build_geometry(squashed, {0.1, 0.2});
    FAIL() << "expected a geometry error";
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("0.1"), std::string::npos);
  }
}

TEST(BuildGeometry, ClosedFormOracle) {
  std::mt19937_64 rng(11);
  for (const auto& c : builtin_charts()) {
    for (int n = 0; n < 200; ++n) {
      const Vec2d xi = random_interior(c, rng);
      const auto g = build_geometry(c, xi);
      const auto p = closed_form_partials(c, xi[0], xi[1]);
      const std::array<double, 3> n3{p.a1[1] * p.a2[2] - p.a1[2] * p.a2[1],
                                     p.a1[2] * p.a2[0] - p.a1[0] * p.a2[2],
                                     p.a1[0] * p.a2[1] - p.a1[1] * p.a2[0]};
      const double len = std::sqrt(d3(n3, n3));
      const std::array<double, 3> a3{n3[0] / len, n3[1] / len, n3[2] / len};
      const double A[2][2] = {{d3(p.a1, p.a1), d3(p.a1, p.a2)}, {d3(p.a2, p.a1), d3(p.a2, p.a2)}};
      const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
      const double Ai[2][2] = {{A[1][1] / det, -A[0][1] / det}, {-A[1][0] / det, A[0][0] / det}};
      const std::array<double, 3>* pp[2][2] = {{&p.p11, &p.p12}, {&p.p12, &p.p22}};
      double B[2][2], Bm[2][2], G[2][2][2];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) B[a][b] = d3(a3, *pp[a][b]);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) Bm[a][b] = Ai[a][0] * B[0][b] + Ai[a][1] * B[1][b];
      for (int r = 0; r < 2; ++r)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            G[r][a][b] = Ai[r][0] * d3(p.a1, *pp[a][b]) + Ai[r][1] * d3(p.a2, *pp[a][b]);
      const double tol = 1e-10;
      for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(g.a1[k], p.a1[k], tol);
        EXPECT_NEAR(g.a2[k], p.a2[k], tol);
        EXPECT_NEAR(g.a3[k], a3[k], tol);
        EXPECT_NEAR(g.Ttheta[0][k], p.a1[k], tol);
        EXPECT_NEAR(g.Ttheta[1][k], p.a2[k], tol);
      }
      EXPECT_NEAR(g.sqrt_a, len, tol);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          EXPECT_NEAR(g.a_cov[a][b], A[a][b], tol);
          EXPECT_NEAR(g.a_con[a][b], Ai[a][b], tol);
          EXPECT_NEAR(g.b_cov[a][b], B[a][b], tol);
          EXPECT_NEAR(g.b_mix[a][b], Bm[a][b], tol);
          EXPECT_NEAR(g.c_cov[a][b], Bm[0][a] * B[0][b] + Bm[1][a] * B[1][b], tol);
          for (int r = 0; r < 2; ++r) EXPECT_NEAR(g.gamma[r][a][b], G[r][a][b], tol);
          for (int k = 0; k < 3; ++k) EXPECT_NEAR(g.dTu[b][a][k], (*pp[a][b])[k], tol);
        }
    }
  }
}

TEST(BuildGeometry, Invariants) {
  std::mt19937_64 rng(3);
  for (const auto& c : builtin_charts()) {
    for (int n = 0; n < 1000; ++n) {
      const auto g = build_geometry(c, random_interior(c, rng));
      EXPECT_NEAR(d3(g.a3, g.a3), 1.0, 1e-12);
      EXPECT_NEAR(d3(g.a3, g.a1), 0.0, 1e-12);
      EXPECT_NEAR(d3(g.a3, g.a2), 0.0, 1e-12);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double I = g.a_con[a][0] * g.a_cov[0][b] + g.a_con[a][1] * g.a_cov[1][b];
          EXPECT_NEAR(I, a == b ? 1.0 : 0.0, 1e-10);
          EXPECT_NEAR(g.b_cov[a][b], g.b_cov[b][a], 1e-10);
          EXPECT_NEAR(g.gamma[0][a][b], g.gamma[0][b][a], 1e-10);
          EXPECT_NEAR(g.gamma[1][a][b], g.gamma[1][b][a], 1e-10);
          EXPECT_NEAR(g.c_cov[a][b], g.b_mix[0][a] * g.b_cov[0][b] + g.b_mix[1][a] * g.b_cov[1][b],
                      1e-10);
        }
      EXPECT_NEAR(d3(g.V1, g.a3), 0.0, 1e-12);
      EXPECT_NEAR(d3(g.V2, g.a3), 0.0, 1e-12);
      EXPECT_NEAR(d3(g.V1, g.V2), 0.0, 1e-12);
      EXPECT_GT(g.sqrt_a, 0.0);
    }
  }
}

TEST(BuildGeometry, JetPartialsMatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  const double h = 1e-6;
  for (const auto& c : builtin_charts()) {
    for (int n = 0; n < 20; ++n) {
      const Vec2d xi = random_interior(c, rng);
      const auto gj = build_geometry_jet(c, xi);
      for (int beta = 0; beta < 2; ++beta) {
        Vec2d xp = xi, xm = xi;
        xp[beta] += h;
        xm[beta] -= h;
        const auto gp = build_geometry(c, xp), gm = build_geometry(c, xm);
        auto fd = [&](double p, double m) { return (p - m) / (2 * h); };
        EXPECT_NEAR(gj.sqrt_a.d[beta], fd(gp.sqrt_a, gm.sqrt_a), 1e-6);
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            EXPECT_NEAR(gj.a_con[a][b].d[beta], fd(gp.a_con[a][b], gm.a_con[a][b]), 1e-5);
            EXPECT_NEAR(gj.b_mix[a][b].d[beta], fd(gp.b_mix[a][b], gm.b_mix[a][b]), 1e-5);
            EXPECT_NEAR(gj.Rv[a][b].d[beta], fd(gp.Rv[a][b], gm.Rv[a][b]), 1e-5);
            EXPECT_NEAR(gj.dRv[beta][a][b].v, fd(gp.Rv[a][b], gm.Rv[a][b]), 1e-5);
            for (int r = 0; r < 2; ++r)
              EXPECT_NEAR(gj.gamma[r][a][b].d[beta], fd(gp.gamma[r][a][b], gm.gamma[r][a][b]),
                          1e-5);
          }
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < 3; ++k) {
            EXPECT_NEAR(gj.dTu[beta][i][k].v, fd(gp.Tu[i][k], gm.Tu[i][k]), 1e-5);
            EXPECT_NEAR(gj.Tu[i][k].d[beta], fd(gp.Tu[i][k], gm.Tu[i][k]), 1e-5);
          }
      }
    }
  }
}

TEST(VFrame, VerticalNormal) {
  const auto f = v_frame<double>({0.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(f.V1[0], 1.0);
  EXPECT_DOUBLE_EQ(f.V1[1], 0.0);
  EXPECT_DOUBLE_EQ(f.V1[2], 0.0);
  EXPECT_DOUBLE_EQ(f.V2[0], 0.0);
  EXPECT_DOUBLE_EQ(f.V2[1], -1.0);
  EXPECT_DOUBLE_EQ(f.V2[2], 0.0);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(f.Tv[i][0], f.V2[i]);
    EXPECT_EQ(f.Tv[i][1], f.V1[i]);
  }
}

TEST(VFrame, NormalAlongYUsesFixedAxis) {
  const auto f = v_frame<double>({0.0, 1.0, 0.0});
  EXPECT_EQ(f.V1[0], 0.0);
  EXPECT_EQ(f.V1[1], 0.0);
  EXPECT_EQ(f.V1[2], 1.0);
  EXPECT_NEAR(d3(f.V2, f.V2), 1.0, 1e-15);
}

TEST(VFrame, OrthonormalAndTangent) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  for (int n = 0; n < 1000; ++n) {
    std::array<double, 3> a{n01(rng), n01(rng), n01(rng)};
    if (n % 4 == 0) a = {1e-8 * n01(rng), 1.0, 1e-8 * n01(rng)};
    if (n % 4 == 1) a = {1e-8 * n01(rng), -1.0, 1e-8 * n01(rng)};
    const double l = std::sqrt(d3(a, a));
    for (auto& v : a) v /= l;
    const auto f = v_frame<double>(a);
    EXPECT_NEAR(d3(f.V1, a), 0.0, 1e-12);
    EXPECT_NEAR(d3(f.V2, a), 0.0, 1e-12);
    EXPECT_NEAR(d3(f.V1, f.V1), 1.0, 1e-12);
    EXPECT_NEAR(d3(f.V2, f.V2), 1.0, 1e-12);
    EXPECT_NEAR(d3(f.V1, f.V2), 0.0, 1e-12);
  }
}

TEST(FrameTransforms, NormalMapsToThirdComponent) {
  std::mt19937_64 rng(13);
  for (const auto& c : builtin_charts()) {
    const auto g = build_geometry(c, random_interior(c, rng));
    const auto [Tu, Tt] = frame_transforms(g);
    EXPECT_NEAR(d3(Tu[2], g.a3), 1.0, 1e-12);
    EXPECT_NEAR(d3(Tu[0], g.a3), 0.0, 1e-12);
    EXPECT_NEAR(d3(Tu[1], g.a3), 0.0, 1e-12);
    EXPECT_NEAR(d3(Tt[0], g.a3), 0.0, 1e-12);
  }
}

TEST(BoundaryNormal, FlatPlateEdge) {
  const auto s = boundary_normal(Chart::flat_plate(), {0.5, 0.1}, Edge::xi1_max);
  EXPECT_NEAR(s.nu_cov[0], 1.0, 1e-15);
  EXPECT_NEAR(s.nu_cov[1], 0.0, 1e-15);
  EXPECT_NEAR(s.nu_con[0], 1.0, 1e-15);
}

TEST(BoundaryNormal, ScordelisCurvedEdgeHasUnitMetricLength) {
  const double th = 2 * kPi / 9;
  const auto s = boundary_normal(Chart::scordelis_lo(), {0.1, th}, Edge::xi2_max);
  // a_cov = diag(1, 0.25): contravariant nu = (0, 2), covariant nu = (0, 0.5).
  EXPECT_NEAR(s.nu_con[0], 0.0, 1e-15);
  EXPECT_NEAR(s.nu_con[1], 2.0, 1e-12);
  EXPECT_NEAR(s.nu_cov[1], 0.5, 1e-12);
  const auto g = build_geometry(Chart::scordelis_lo(), {0.1, th});
  double q = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) q += s.nu_con[a] * s.nu_con[b] * g.a_cov[a][b];
  EXPECT_NEAR(q, 1.0, 1e-12);
}

TEST(BoundaryNormal, ConormalIsPerpendicularToEdgeTangent) {
  // Hyperbolic paraboloid edge xi1 = 1/2: the tangent along the edge is a2.
  const Chart c = Chart::hyperbolic_paraboloid();
  for (double y : {-0.4, -0.1, 0.0, 0.3}) {
    const auto s = boundary_normal(c, {0.5, y}, Edge::xi1_max);
    const auto g = build_geometry(c, {0.5, y});
    std::array<double, 3> nu{};
    for (int k = 0; k < 3; ++k) nu[k] = s.nu_con[0] * g.a1[k] + s.nu_con[1] * g.a2[k];
    EXPECT_NEAR(d3(nu, g.a2), 0.0, 1e-12);
    EXPECT_NEAR(d3(nu, nu), 1.0, 1e-12);
    EXPECT_GT(d3(nu, g.a1), 0.0);
  }
}

TEST(BoundaryNormal, DiscReferenceNormal) {
  const double t = 0.7, r = 0.9;
  const RefDomain d = RefDomain::disc(r);
  const auto n = reference_normal(d, {r * std::cos(t), r * std::sin(t)}, Edge::circle);
  EXPECT_NEAR(n[0], std::cos(t), 1e-15);
  EXPECT_NEAR(n[1], std::sin(t), 1e-15);
}

TEST(BoundaryNormal, CornerAndOffEdgeThrow) {
  EXPECT_THROW(boundary_normal(Chart::flat_plate(), {0.5, 0.5}, Edge::xi1_max), GeometryError);
  EXPECT_THROW(boundary_normal(Chart::flat_plate(), {0.2, 0.1}, Edge::xi1_max), GeometryError);
  EXPECT_THROW(boundary_normal(Chart::flat_plate(), {0.5, 0.1}, Edge::xi1_min), GeometryError);
}

TEST(PrecomputeGeometry, PositionalCache) {
  const Chart c = Chart::hyperbolic_paraboloid();
  EXPECT_TRUE(precompute_geometry(c, {}).empty());
  const std::vector<Vec2d> pts{{0.1, 0.2}, {0.1, 0.2}, {-0.3, 0.4}};
  const auto cache = precompute_geometry(c, pts);
  ASSERT_EQ(cache.size(), 3u);
  EXPECT_EQ(cache[0].sqrt_a, cache[1].sqrt_a);
  EXPECT_EQ(cache[2].sqrt_a, build_geometry(c, pts[2]).sqrt_a);
}

TEST(RefDomain, Area) {
  EXPECT_DOUBLE_EQ(Chart::hyperbolic_paraboloid().domain().area(), 1.0);
  EXPECT_DOUBLE_EQ(Chart::hemisphere().domain().area(), kPi);
  EXPECT_NEAR(Chart::scordelis_lo().domain().area(), 4 * kPi / 9, 1e-15);
}
