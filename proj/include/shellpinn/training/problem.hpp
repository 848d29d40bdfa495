#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "shellpinn/autodiff/dual.hpp"
#include "shellpinn/errors.hpp"
#include "shellpinn/geometry/chart.hpp"
#include "shellpinn/mechanics/constitutive.hpp"
#include "shellpinn/mechanics/kinematics.hpp"
#include "shellpinn/network/trial.hpp"
#include "shellpinn/small_tensor.hpp"

namespace shellpinn {

/// Distributed load per unit midsurface area in global coordinates:
///   F(xi, t) = force * t^thickness_power * exp(-|xi|^2 / kernel_width)
/// The kernel factor is omitted when kernel_width is 0.
struct LoadSpec {
  Vec3<double> force{0.0, 0.0, 0.0};
  int thickness_power = 0;
  double kernel_width = 0.0;

  void validate() const {
    if (thickness_power < 0 || thickness_power > 3) {
      throw ConfigError("load_thickness_power", "must be an integer in [0, 3]");
    }
    if (kernel_width < 0.0) throw ConfigError("load_kernel_width", "must be non-negative");
  }

  double profile(Vec2d xi) const {
    return kernel_width > 0.0 ? std::exp(-(xi[0] * xi[0] + xi[1] * xi[1]) / kernel_width) : 1.0;
  }

  template <class S>
  S thickness_factor(const S& t) const {
    S f = S(1.0);
    for (int i = 0; i < thickness_power; ++i) f = f * t;
    return f;
  }

  template <class S>
  Vec3<S> at(Vec2d xi, const S& t) const {
    const S s = thickness_factor(t) * profile(xi);
    return {s * force[0], s * force[1], s * force[2]};
  }
};

/// A boundary value problem for the shell: geometry, material, load and the
/// boundary description used by the strong form. Dirichlet data are zero.
struct Problem {
  Chart chart;
  Material material;
  LoadSpec load;
  TrialFunction trial;
  RotationBasis basis = RotationBasis::covariant;
  std::vector<Edge> neumann_edges;
  std::vector<Edge> dirichlet_edges;
  /// Which outputs (u1, u2, u3, rot1, rot2) are prescribed on dirichlet_edges.
  std::array<bool, 5> dirichlet_mask{true, true, true, true, true};

  void validate() const {
    material.validate();
    load.validate();
    const RefDomain d = chart.domain();
    if (d.kind == DomainKind::disc && !(neumann_edges.empty() && dirichlet_edges.empty())) {
      throw ConfigError("boundary", "edge conditions on disc domains must be imposed by trial functions");
    }
  }
};

}  // namespace shellpinn
