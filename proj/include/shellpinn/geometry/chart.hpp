#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "shellpinn/autodiff/dual.hpp"
#include "shellpinn/errors.hpp"
#include "shellpinn/small_tensor.hpp"

namespace shellpinn {

enum class DomainKind { rectangle, disc };

/// Edges of a reference domain. `circle` is the rim of a disc.
enum class Edge { xi1_min, xi1_max, xi2_min, xi2_max, circle };

inline std::string_view to_string(Edge e) {
  switch (e) {
    case Edge::xi1_min: return "xi1_min";
    case Edge::xi1_max: return "xi1_max";
    case Edge::xi2_min: return "xi2_min";
    case Edge::xi2_max: return "xi2_max";
    case Edge::circle: return "circle";
  }
  return "?";
}

inline Edge edge_from_string(std::string_view s) {
  if (s == "xi1_min") return Edge::xi1_min;
  if (s == "xi1_max") return Edge::xi1_max;
  if (s == "xi2_min") return Edge::xi2_min;
  if (s == "xi2_max") return Edge::xi2_max;
  if (s == "circle") return Edge::circle;
  throw ConfigError("edge", "unknown edge '" + std::string(s) + "'");
}

/// Parameter domain omega of a chart.
struct RefDomain {
  DomainKind kind = DomainKind::rectangle;
  double lo1 = -0.5, hi1 = 0.5, lo2 = -0.5, hi2 = 0.5;  // rectangle bounds
  double radius = 1.0;                                  // disc radius (centred at 0)

  static RefDomain rectangle(double lo1, double hi1, double lo2, double hi2) {
    return {DomainKind::rectangle, lo1, hi1, lo2, hi2, 0.0};
  }
  static RefDomain disc(double r) { return {DomainKind::disc, -r, r, -r, r, r}; }

  /// |omega| = integral of d xi^1 d xi^2.
  double area() const {
    return kind == DomainKind::rectangle ? (hi1 - lo1) * (hi2 - lo2)
                                         : std::numbers::pi * radius * radius;
  }
};

enum class ChartKind { flat_plate, hyperbolic_paraboloid, scordelis_lo, hemisphere };

inline std::string_view to_string(ChartKind k) {
  switch (k) {
    case ChartKind::flat_plate: return "flat_plate";
    case ChartKind::hyperbolic_paraboloid: return "hyperbolic_paraboloid";
    case ChartKind::scordelis_lo: return "scordelis_lo";
    case ChartKind::hemisphere: return "hemisphere";
  }
  return "?";
}

inline ChartKind chart_kind_from_string(std::string_view s) {
  if (s == "flat_plate") return ChartKind::flat_plate;
  if (s == "hyperbolic_paraboloid") return ChartKind::hyperbolic_paraboloid;
  if (s == "scordelis_lo") return ChartKind::scordelis_lo;
  if (s == "hemisphere") return ChartKind::hemisphere;
  throw ConfigError("chart", "unknown chart '" + std::string(s) + "'");
}

/// Midsurface parameterisation phi: omega -> R^3. Builtin families with
/// numeric parameters; the map is templated on the scalar so it can be
/// differentiated to any order by nesting duals.
struct Chart {
  ChartKind kind = ChartKind::flat_plate;
  double length = 1.0;                          // extent along xi^1
  double width = 1.0;                           // extent along xi^2 (plate, paraboloid)
  double height = 1.0;                          // paraboloid: z = height*((xi^1)^2-(xi^2)^2)
  double radius = 0.5;                          // cylinder or sphere radius
  double half_angle = 2.0 * std::numbers::pi / 9.0;  // cylinder opening half-angle

  static Chart flat_plate(double length = 1.0, double width = 1.0) {
    Chart c;
    c.kind = ChartKind::flat_plate;
    c.length = length;
    c.width = width;
    return c;
  }
  static Chart hyperbolic_paraboloid(double length = 1.0, double height = 1.0) {
    Chart c;
    c.kind = ChartKind::hyperbolic_paraboloid;
    c.length = length;
    c.width = length;
    c.height = height;
    return c;
  }
  static Chart scordelis_lo(double length = 1.0, double radius = 0.5,
                            double half_angle = 2.0 * std::numbers::pi / 9.0) {
    Chart c;
    c.kind = ChartKind::scordelis_lo;
    c.length = length;
    c.radius = radius;
    c.half_angle = half_angle;
    return c;
  }
  static Chart hemisphere(double radius = 1.0) {
    Chart c;
    c.kind = ChartKind::hemisphere;
    c.radius = radius;
    return c;
  }

  RefDomain domain() const {
    switch (kind) {
      case ChartKind::flat_plate:
      case ChartKind::hyperbolic_paraboloid:
        return RefDomain::rectangle(-0.5 * length, 0.5 * length, -0.5 * width, 0.5 * width);
      case ChartKind::scordelis_lo:
        return RefDomain::rectangle(-0.5 * length, 0.5 * length, -half_angle, half_angle);
      case ChartKind::hemisphere:
        return RefDomain::disc(radius);
    }
    return {};
  }

  template <class S>
  Vec3<S> map(const S& x1, const S& x2) const {
    switch (kind) {
      case ChartKind::flat_plate:
        return {x1, x2, S(0.0)};
      case ChartKind::hyperbolic_paraboloid:
        return {x1, x2, height * (x1 * x1 - x2 * x2)};
      case ChartKind::scordelis_lo:
        return {x1, radius * ad::sin(x2), radius * ad::cos(x2)};
      case ChartKind::hemisphere:
        return {x1, x2, ad::sqrt(radius * radius - x1 * x1 - x2 * x2)};
    }
    return {S(0.0), S(0.0), S(0.0)};
  }
};

}  // namespace shellpinn
