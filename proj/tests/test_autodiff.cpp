#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "shellpinn/autodiff/dual.hpp"
#include "shellpinn/autodiff/jet.hpp"
#include "shellpinn/autodiff/tape.hpp"

using namespace shellpinn;
using namespace shellpinn::ad;

namespace {

/// Tiny scalar MLP over any scalar type, used as an independent reference.
template <class S, class P>
std::vector<S> small_net(const P& p, const std::vector<int>& widths, std::vector<S> x) {
  std::size_t k = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    std::vector<S> y(widths[l + 1]);
    for (int o = 0; o < widths[l + 1]; ++o) {
      S z = S(0.0);
      for (int i = 0; i < widths[l]; ++i) z = z + S(p[k + o * widths[l] + i]) * x[i];
      y[o] = z;
    }
    k += widths[l + 1] * widths[l];
    for (int o = 0; o < widths[l + 1]; ++o) {
      y[o] = y[o] + S(p[k + o]);
      if (l + 2 < widths.size()) y[o] = gelu(y[o]);
    }
    k += widths[l + 1];
    x = std::move(y);
  }
  return x;
}

std::size_t net_size(const std::vector<int>& w) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) n += w[l + 1] * (w[l] + 1);
  return n;
}

std::vector<double> random_params(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::vector<double> p(n);
  for (auto& v : p) v = u(rng);
  return p;
}

double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

template <class F>
std::vector<double> central_diff(F&& f, std::vector<double> p, double h) {
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double p0 = p[i];
    p[i] = p0 + h;
    const double fp = f(p);
    p[i] = p0 - h;
    const double fm = f(p);
    p[i] = p0;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST(JetEval, SquareOnFirstCoordinate) {
  auto f = [](auto a, auto) { return std::array{a * a}; };
  const Jet2 j = jet_eval(f, {3.0, 0.0}, 2);
  EXPECT_DOUBLE_EQ(j.value[0], 9.0);
  EXPECT_DOUBLE_EQ(j.d1[0][0], 6.0);
  EXPECT_DOUBLE_EQ(j.d1[0][1], 0.0);
  ASSERT_TRUE(j.d2.has_value());
  EXPECT_DOUBLE_EQ((*j.d2)[0][0][0], 2.0);
}

TEST(JetEval, GeluAtZero) {
  auto f = [](auto a, auto) { return std::array{gelu(a)}; };
  const Jet2 j = jet_eval(f, {0.0, 0.0}, 1);
  EXPECT_DOUBLE_EQ(j.value[0], 0.0);
  EXPECT_NEAR(j.d1[0][0], 0.5, 1e-15);
  EXPECT_FALSE(j.d2.has_value());
}

TEST(JetEval, HemisphereApex) {
  auto f = [](auto a, auto b) { return std::array{sqrt(1.0 - a * a - b * b)}; };
  const Jet2 j = jet_eval(f, {0.0, 0.0}, 2);
  EXPECT_DOUBLE_EQ(j.value[0], 1.0);
  EXPECT_DOUBLE_EQ(j.d1[0][0], 0.0);
  EXPECT_DOUBLE_EQ(j.d1[0][1], 0.0);
  const auto& h = (*j.d2)[0];
  EXPECT_NEAR(h[0][0], -1.0, 1e-15);
  EXPECT_NEAR(h[1][1], -1.0, 1e-15);
  EXPECT_NEAR(h[0][1], 0.0, 1e-15);
}

TEST(JetEval, DomainViolationThrows) {
  auto f = [](auto a, auto b) { return std::array{sqrt(1.0 - a * a - b * b)}; };
  EXPECT_THROW(jet_eval(f, {0.9, 0.9}, 2), EvaluationError);
  EXPECT_THROW(jet_eval(f, {1.0, 0.0}, 1), EvaluationError);
  EXPECT_THROW(jet_eval(f, {0.0, 0.0}, 3), Error);
  auto g = [](auto a, auto) { return std::array{log(a)}; };
  EXPECT_THROW(jet_eval(g, {-1.0, 0.0}, 1), EvaluationError);
}

TEST(JetEval, AgreesWithAnalyticPartials) {
  auto f = [](auto a, auto b) { return std::array{sin(a) * exp(b), a / (1.0 + b * b), tanh(a * b)}; };
  const double x = 0.3, y = -0.7;
  const Jet2 j = jet_eval(f, {x, y}, 2);
  const auto& d2 = *j.d2;
  EXPECT_NEAR(j.d1[0][0], std::cos(x) * std::exp(y), 1e-14);
  EXPECT_NEAR(j.d1[0][1], std::sin(x) * std::exp(y), 1e-14);
  EXPECT_NEAR(d2[0][0][0], -std::sin(x) * std::exp(y), 1e-14);
  EXPECT_NEAR(d2[0][0][1], std::cos(x) * std::exp(y), 1e-14);
  const double q = 1.0 + y * y;
  EXPECT_NEAR(d2[1][1][1], x * (6.0 * y * y - 2.0) / (q * q * q), 1e-14);
  const double t = std::tanh(x * y), s = 1.0 - t * t;
  EXPECT_NEAR(d2[2][0][1], s + x * y * (-2.0 * t * s), 1e-14);
}

TEST(JetEval, SchwarzSymmetryOnRandomNets) {
  const std::vector<int> w{2, 8, 8, 3};
  for (unsigned s = 0; s < 20; ++s) {
    const auto p = random_params(net_size(w), s);
    auto f = [&](auto a, auto b) {
      using S = decltype(a);
      return small_net<S>(p, w, {a, sin(b) * a + b});
    };
    std::mt19937_64 rng(s + 100);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Jet2 j = jet_eval(f, {u(rng), u(rng)}, 2);
    for (const auto& h : *j.d2) EXPECT_NEAR(h[0][1], h[1][0], 1e-12);
  }
}

TEST(ParamGrad, LinearQuadraticForm) {
  const std::vector<double> W{0.5, -1.0, 2.0, 0.25};  // 2x2 row-major
  const std::array<double, 2> xi{0.7, -0.3};
  auto g = param_grad(
      [&](std::span<const Var> w) {
        Var y0 = w[0] * xi[0] + w[1] * xi[1];
        Var y1 = w[2] * xi[0] + w[3] * xi[1];
        return 0.5 * (y0 * y0 + y1 * y1);
      },
      W);
  const double y0 = W[0] * xi[0] + W[1] * xi[1], y1 = W[2] * xi[0] + W[3] * xi[1];
  EXPECT_NEAR(g[0], y0 * xi[0], 1e-15);
  EXPECT_NEAR(g[1], y0 * xi[1], 1e-15);
  EXPECT_NEAR(g[2], y1 * xi[0], 1e-15);
  EXPECT_NEAR(g[3], y1 * xi[1], 1e-15);
}

TEST(ParamGrad, ConstantLossGivesZero) {
  const std::vector<double> p{1.0, 2.0, 3.0};
  auto g = param_grad([](std::span<const Var>) { return Var(4.0); }, p);
  ASSERT_EQ(g.size(), 3u);
  for (double v : g) EXPECT_EQ(v, 0.0);
}

TEST(ParamGrad, LengthMismatchThrows) {
  const std::vector<double> p{1.0, 2.0};
  ParamTape tape(p);
  Var l = tape.parameters()[0] * tape.parameters()[1];
  EXPECT_THROW(param_grad(l, tape, 3), DimensionError);
  EXPECT_EQ(param_grad(l, tape, 2).size(), 2u);
}

TEST(ParamGrad, ReplayIsBitExact) {
  const std::vector<int> w{2, 16, 5};
  const auto p = random_params(net_size(w), 7);
  ParamTape tape(p);
  auto out = small_net<Var>(tape.parameters(), w, {Var(0.2), Var(-0.4)});
  Var l = out[0] + out[1] * out[2] - sin(out[3]) + sqrt(out[4] * out[4] + 1.0);
  const double first = l.value;
  EXPECT_EQ(tape.replay(p, l), first);
  auto p2 = p;
  p2[3] += 0.1;
  const double shifted = tape.replay(p2, l);
  ParamTape fresh(p2);
  auto out2 = small_net<Var>(fresh.parameters(), w, {Var(0.2), Var(-0.4)});
  Var l2 = out2[0] + out2[1] * out2[2] - sin(out2[3]) + sqrt(out2[4] * out2[4] + 1.0);
  EXPECT_EQ(shifted, l2.value);
  EXPECT_THROW(tape.replay(std::vector<double>(3, 0.0), l), DimensionError);
}

TEST(ParamGrad, GeluNetMatchesFiniteDifferences) {
  const std::vector<int> w{2, 16, 5};
  for (unsigned s = 0; s < 100; ++s) {
    const auto p = random_params(net_size(w), s);
    auto loss_d = [&](const std::vector<double>& q) {
      auto o = small_net<double>(q, w, {0.3, -0.6});
      double acc = 0.0;
      for (double v : o) acc += v;
      return acc;
    };
    auto g = param_grad(
        [&](std::span<const Var> q) {
          auto o = small_net<Var>(q, w, {Var(0.3), Var(-0.6)});
          Var acc(0.0);
          for (const auto& v : o) acc += v;
          return acc;
        },
        p);
    EXPECT_LE(rel_err(g, central_diff(loss_d, p, 1e-5)), 1e-6) << "seed " << s;
  }
}

TEST(ParamGrad, ThroughInputDerivatives) {
  // Loss consumes first and second input partials of the network, as the
  // weak and strong losses do.
  const std::vector<int> w{2, 10, 10, 3};
  auto loss_of = [&](const auto& q) {
    using P = std::decay_t<decltype(q[0])>;
    using S1 = Dual<P>;
    using S2 = Dual<S1>;
    const double x = 0.25, y = -0.4;
    S2 a{S1(P(x), P(1.0), P(0.0)), S1(P(1.0)), S1(P(0.0))};
    S2 b{S1(P(y), P(0.0), P(1.0)), S1(P(0.0)), S1(P(1.0))};
    auto o = small_net<S2>(q, w, {a, b});
    P acc(0.0);
    for (const auto& v : o) {
      acc += v.v.d[0] * v.v.d[1] + v.d[0].d[0] * v.d[1].d[1] + v.d[0].d[1] * v.v.v;
    }
    return acc;
  };
  for (unsigned s = 0; s < 10; ++s) {
    const auto p = random_params(net_size(w), s + 500);
    auto g = param_grad([&](std::span<const Var> q) { return loss_of(q); }, p);
    auto fd = central_diff([&](const std::vector<double>& q) { return loss_of(q); }, p, 1e-5);
    EXPECT_LE(rel_err(g, fd), 1e-6) << "seed " << s;
  }
}
