#pragma once

#include <array>
#include <cmath>

#include "shellpinn/geometry/chart.hpp"

namespace shellpinn::testing {

/// Hand-derived first and second partials of the builtin charts.
struct ChartPartials {
  std::array<double, 3> phi, a1, a2;
  std::array<double, 3> p11, p12, p22;
};

inline ChartPartials closed_form_partials(const Chart& c, double x, double y) {
  ChartPartials p{};
  switch (c.kind) {
    case ChartKind::flat_plate:
      p.phi = {x, y, 0};
      p.a1 = {1, 0, 0};
      p.a2 = {0, 1, 0};
      break;
    case ChartKind::hyperbolic_paraboloid: {
      const double h = c.height;
      p.phi = {x, y, h * (x * x - y * y)};
      p.a1 = {1, 0, 2 * h * x};
      p.a2 = {0, 1, -2 * h * y};
      p.p11 = {0, 0, 2 * h};
      p.p22 = {0, 0, -2 * h};
      break;
    }
    case ChartKind::scordelis_lo: {
      const double r = c.radius;
      p.phi = {x, r * std::sin(y), r * std::cos(y)};
      p.a1 = {1, 0, 0};
      p.a2 = {0, r * std::cos(y), -r * std::sin(y)};
      p.p22 = {0, -r * std::sin(y), -r * std::cos(y)};
      break;
    }
    case ChartKind::hemisphere: {
      const double R2 = c.radius * c.radius;
      const double z = std::sqrt(R2 - x * x - y * y);
      const double z3 = z * z * z;
      p.phi = {x, y, z};
      p.a1 = {1, 0, -x / z};
      p.a2 = {0, 1, -y / z};
      p.p11 = {0, 0, -(R2 - y * y) / z3};
      p.p12 = {0, 0, -x * y / z3};
      p.p22 = {0, 0, -(R2 - x * x) / z3};
      break;
    }
  }
  return p;
}

}  // namespace shellpinn::testing
