#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace shellpinn::testing {

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Tensor Gauss rule on [lo1, hi1] x [lo2, hi2]: points and weights.
struct QuadRule {
  std::vector<std::array<double, 2>> pts;
  std::vector<double> w;
};

inline QuadRule tensor_gauss(double lo1, double hi1, double lo2, double hi2, int n1, int n2) {
  const auto [x1, w1] = gauss_legendre(n1);
  const auto [x2, w2] = gauss_legendre(n2);
  QuadRule q;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      q.pts.push_back({lo1 + 0.5 * (hi1 - lo1) * (x1[i] + 1.0), lo2 + 0.5 * (hi2 - lo2) * (x2[j] + 1.0)});
      q.w.push_back(0.25 * (hi1 - lo1) * (hi2 - lo2) * w1[i] * w2[j]);
    }
  return q;
}

}  // namespace shellpinn::testing
