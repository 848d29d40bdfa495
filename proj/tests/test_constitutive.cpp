#include <gtest/gtest.h>

#include <random>

#include "shellpinn/mechanics/constitutive.hpp"

using namespace shellpinn;

namespace {
Mat2<double> identity() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

Mat2<double> random_spd(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng), b = u(rng), c = u(rng);
  // L L^T + 0.1 I
  return {{{a * a + 0.1, a * b}, {a * b, b * b + c * c + 0.1}}};
}

Strains<double> random_strains(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Strains<double> s;
  s.e = {{{u(rng), 0.0}, {0.0, u(rng)}}};
  s.e[0][1] = s.e[1][0] = u(rng);
  s.k = {{{u(rng), 0.0}, {0.0, u(rng)}}};
  s.k[0][1] = s.k[1][0] = u(rng);
  s.gamma = {u(rng), u(rng)};
  return s;
}
}  // namespace

TEST(Lame, Examples) {
  auto l = lame(1.0, 0.0);
  EXPECT_DOUBLE_EQ(l.lambda, 0.0);
  EXPECT_DOUBLE_EQ(l.mu, 0.5);
  EXPECT_DOUBLE_EQ(2 * l.lambda * l.mu / (l.lambda + 2 * l.mu), 0.0);
  l = lame(1.0, 0.3);
  EXPECT_NEAR(l.lambda, 0.3 / (1.3 * 0.4), 1e-15);
  EXPECT_NEAR(l.lambda, 0.5769, 1e-4);
  EXPECT_NEAR(l.mu, 0.3846, 1e-4);
}

TEST(Lame, RejectsInvalidMaterial) {
  EXPECT_THROW(lame(1.0, 0.5), ConfigError);
  EXPECT_THROW(lame(1.0, -1.0), ConfigError);
  EXPECT_THROW(lame(0.0, 0.3), ConfigError);
  Material m;
  m.t = 0.0;
  EXPECT_THROW(m.validate(), ConfigError);
}

TEST(ElasticityTensors, IdentityMetric) {
  auto T = elasticity_tensors(identity(), 0.0, 0.5);
  EXPECT_DOUBLE_EQ(T.C[0][0][0][0], 1.0);
  EXPECT_DOUBLE_EQ(T.C[0][0][1][1], 0.0);
  EXPECT_DOUBLE_EQ(T.C[0][1][0][1], 0.5);
  EXPECT_DOUBLE_EQ(T.D[0][0], 0.5);
  EXPECT_DOUBLE_EQ(T.D[0][1], 0.0);
  const auto l = lame(1.0, 0.3);
  T = elasticity_tensors(identity(), l.lambda, l.mu);
  // 2 lambda mu / (lambda + 2 mu) = E nu / (1 - nu^2)
  EXPECT_NEAR(T.C[0][0][1][1], 0.3 / 0.91, 1e-14);
  EXPECT_NEAR(T.C[0][0][1][1], 0.32967, 1e-5);
}

TEST(ElasticityTensors, RaisedMetricScaling) {
  const auto l = lame(1.0, 0.3);
  const Mat2<double> a_con{{{1.0, 0.0}, {0.0, 4.0}}};
  const auto T = elasticity_tensors(a_con, l.lambda, l.mu);
  const double c0 = 2 * l.lambda * l.mu / (l.lambda + 2 * l.mu);
  EXPECT_NEAR(T.C[1][1][1][1], (c0 + 2 * l.mu) * 16.0, 1e-14);
  EXPECT_NEAR(T.C[0][0][0][0], c0 + 2 * l.mu, 1e-14);
}

TEST(ElasticityTensors, SymmetriesAndDefiniteness) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 10000; ++n) {
    const auto a = random_spd(rng);
    const double nu = -0.9 + 1.39 * u(rng);
    const auto l = lame(0.1 + u(rng), nu);
    const auto T = elasticity_tensors(a, l.lambda, l.mu);
    if (n < 200) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int m = 0; m < 2; ++m) {
              EXPECT_NEAR(T.C[i][j][k][m], T.C[j][i][k][m], 1e-12);
              EXPECT_NEAR(T.C[i][j][k][m], T.C[i][j][m][k], 1e-12);
              EXPECT_NEAR(T.C[i][j][k][m], T.C[k][m][i][j], 1e-12);
            }
      EXPECT_EQ(T.D[0][1], T.D[1][0]);
    }
    const auto s = random_strains(rng);
    EXPECT_GE(double_dot(contract(T.C, s.e), s.e), -1e-12);
    EXPECT_GE(dot2(mat_vec(T.D, s.gamma), s.gamma), -1e-12);
  }
}

TEST(Resultants, ZeroAndPlateExample) {
  const auto T = elasticity_tensors(identity(), 0.0, 0.5);
  const auto z = resultants(Strains<double>{}, T, 1.0, 5.0 / 6.0);
  EXPECT_EQ(z.n[0][0], 0.0);
  EXPECT_EQ(z.m[1][1], 0.0);
  EXPECT_EQ(z.q[0], 0.0);
  Strains<double> s{};
  s.e[0][0] = 1.0;
  const auto r = resultants(s, T, 1.0, 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(r.n[0][0], 1.0);
  EXPECT_DOUBLE_EQ(r.n[1][1], 0.0);
  EXPECT_DOUBLE_EQ(r.n[0][1], 0.0);
}

TEST(Resultants, ThicknessScaling) {
  std::mt19937_64 rng(2);
  const auto l = lame(2.0, 0.25);
  const auto T = elasticity_tensors(random_spd(rng), l.lambda, l.mu);
  const auto s = random_strains(rng);
  const auto r1 = resultants(s, T, 0.3, 5.0 / 6.0), r2 = resultants(s, T, 0.6, 5.0 / 6.0);
  for (int a = 0; a < 2; ++a) {
    EXPECT_NEAR(r2.q[a], 2 * r1.q[a], 1e-14);
    for (int b = 0; b < 2; ++b) {
      EXPECT_NEAR(r2.n[a][b], 2 * r1.n[a][b], 1e-14);
      EXPECT_NEAR(r2.m[a][b], 8 * r1.m[a][b], 1e-14);
      EXPECT_EQ(r1.n[a][b], r1.n[b][a]);
      EXPECT_EQ(r1.m[a][b], r1.m[b][a]);
    }
  }
}

TEST(EnergyDensities, Examples) {
  const auto T = elasticity_tensors(identity(), 0.0, 0.5);
  const auto z = energy_densities(Strains<double>{}, T, 1.0, 5.0 / 6.0, 0.0);
  EXPECT_EQ(z.internal(), 0.0);
  Strains<double> s{};
  s.e[0][0] = 1.0;
  const auto d = energy_densities(s, T, 1.0, 5.0 / 6.0, 0.25);
  EXPECT_DOUBLE_EQ(d.membrane, 0.5);
  EXPECT_DOUBLE_EQ(d.external, 0.25);
}

TEST(EnergyDensities, ConsistentWithResultants) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const auto l = lame(u(rng), 0.45 * u(rng));
    const auto T = elasticity_tensors(random_spd(rng), l.lambda, l.mu);
    const auto s = random_strains(rng);
    const double t = u(rng), kappa = 5.0 / 6.0;
    const auto r = resultants(s, T, t, kappa);
    const auto d = energy_densities(s, T, t, kappa, 0.0);
    EXPECT_NEAR(d.membrane, 0.5 * double_dot(r.n, s.e), 1e-12);
    EXPECT_NEAR(d.bending, 0.5 * double_dot(r.m, s.k), 1e-12);
    EXPECT_NEAR(d.shear, 0.5 * dot2(r.q, s.gamma), 1e-12);
    EXPECT_GE(d.membrane, -1e-14);
    EXPECT_GE(d.bending, -1e-14);
    EXPECT_GE(d.shear, -1e-14);
  }
}
