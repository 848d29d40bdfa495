#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "shellpinn/errors.hpp"
#include "shellpinn/geometry/chart.hpp"
#include "shellpinn/geometry/geometry.hpp"

namespace shellpinn {

/// Sobol sequence in Gray-code order for up to two dimensions. Dimension 1 is
/// the van der Corput sequence; dimension 2 uses the primitive polynomial x + 1
/// (direction numbers m = 1, 3, 5, 15, ...).
class SobolSequence {
 public:
  static constexpr int kBits = 32;

  explicit SobolSequence(int dim) : dim_(dim) {
    if (dim < 1 || dim > 2) throw ConfigError("dim", "Sobol sequence supports 1 or 2 dimensions");
    for (int k = 0; k < kBits; ++k) v_[0][k] = std::uint32_t{1} << (kBits - 1 - k);
    std::uint32_t m = 1;
    for (int k = 0; k < kBits; ++k) {
      if (k > 0) m = (m << 1) ^ m;
      v_[1][k] = m << (kBits - 1 - k);
    }
  }

  /// Next point; the first call returns the origin.
  std::array<double, 2> next() {
    std::array<double, 2> out{};
    for (int d = 0; d < dim_; ++d) out[d] = static_cast<double>(x_[d]) * 0x1p-32;
    int c = 0;
    while ((index_ >> c) & 1u) ++c;
    if (c >= kBits) throw Error("sampling", "Sobol sequence exhausted");
    for (int d = 0; d < dim_; ++d) x_[d] ^= v_[d][c];
    ++index_;
    return out;
  }

 private:
  int dim_;
  std::uint64_t index_ = 0;
  std::array<std::uint32_t, 2> x_{};
  std::array<std::array<std::uint32_t, kBits>, 2> v_{};
};

/// n Sobol points in [0,1)^dim (second coordinate 0 when dim = 1).
inline std::vector<ad::Vec2d> sobol(std::size_t n, int dim = 2, bool skip_origin = true) {
  SobolSequence s(dim);
  if (skip_origin) s.next();
  std::vector<ad::Vec2d> pts(n);
  for (auto& p : pts) p = s.next();
  return pts;
}

inline std::vector<ad::Vec2d> uniform_random(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ad::Vec2d> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return pts;
}

/// Concentric square-to-disc map of [0,1]^2 onto the disc of radius r.
inline ad::Vec2d concentric_map(ad::Vec2d p, double r = 1.0) {
  const double a = 2.0 * p[0] - 1.0, b = 2.0 * p[1] - 1.0;
  if (a == 0.0 && b == 0.0) return {0.0, 0.0};
  double rho, phi;
  if (a * a > b * b) {
    rho = a;
    phi = (std::numbers::pi / 4.0) * (b / a);
  } else {
    rho = b;
    phi = std::numbers::pi / 2.0 - (std::numbers::pi / 4.0) * (a / b);
  }
  return {r * rho * std::cos(phi), r * rho * std::sin(phi)};
}

inline std::vector<ad::Vec2d> map_to_domain(const std::vector<ad::Vec2d>& pts, const RefDomain& d) {
  std::vector<ad::Vec2d> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out[i] = d.kind == DomainKind::disc
                 ? concentric_map(pts[i], d.radius)
                 : ad::Vec2d{d.lo1 + (d.hi1 - d.lo1) * pts[i][0], d.lo2 + (d.hi2 - d.lo2) * pts[i][1]};
  }
  return out;
}

/// Disc interior points are kept at radius <= (1 - kDiscShrink) R, away from
/// the chart singularity at the rim.
inline constexpr double kDiscShrink = 1e-6;

enum class Sampler { sobol, uniform_random };

inline Sampler sampler_from_string(std::string_view s) {
  if (s == "sobol") return Sampler::sobol;
  if (s == "uniform_random") return Sampler::uniform_random;
  throw ConfigError("sampler", "expected 'sobol' or 'uniform_random', got '" + std::string(s) + "'");
}

inline std::string_view to_string(Sampler s) { return s == Sampler::sobol ? "sobol" : "uniform_random"; }

inline std::vector<ad::Vec2d> sample_interior(const RefDomain& d, std::size_t n, Sampler sampler,
                                              std::uint64_t seed = 0) {
  auto pts = map_to_domain(sampler == Sampler::sobol ? sobol(n) : uniform_random(n, seed), d);
  if (d.kind == DomainKind::disc) {
    const double rmax = (1.0 - kDiscShrink) * d.radius;
    for (auto& p : pts) {
      const double r = std::hypot(p[0], p[1]);
      if (r > rmax) {
        p[0] *= rmax / r;
        p[1] *= rmax / r;
      }
    }
  }
  return pts;
}

/// n points along one edge of a rectangular domain (1-D Sobol, corners
/// excluded), each with its conormal.
inline std::vector<BoundarySample> sample_boundary(const Chart& chart, Edge edge, std::size_t n) {
  const RefDomain d = chart.domain();
  if (d.kind == DomainKind::disc) {
    throw ConfigError("boundary", "boundary sampling on disc domains is not supported");
  }
  if (edge == Edge::circle) throw ConfigError("boundary", "rectangular domains have no circle edge");
  std::vector<BoundarySample> out;
  out.reserve(n);
  for (const auto& p : sobol(n, 1)) {
    const double s = p[0];
    ad::Vec2d xi{};
    switch (edge) {
      case Edge::xi1_min: xi = {d.lo1, d.lo2 + (d.hi2 - d.lo2) * s}; break;
      case Edge::xi1_max: xi = {d.hi1, d.lo2 + (d.hi2 - d.lo2) * s}; break;
      case Edge::xi2_min: xi = {d.lo1 + (d.hi1 - d.lo1) * s, d.lo2}; break;
      case Edge::xi2_max: xi = {d.lo1 + (d.hi1 - d.lo1) * s, d.hi2}; break;
      case Edge::circle: break;
    }
    out.push_back(boundary_normal(chart, xi, edge));
  }
  return out;
}

/// Collocation points of one problem.
struct PointSet {
  std::vector<ad::Vec2d> interior;
  std::vector<BoundarySample> neumann;
  std::vector<BoundarySample> dirichlet;
};

}  // namespace shellpinn
