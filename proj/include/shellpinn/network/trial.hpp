#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "shellpinn/autodiff/dual.hpp"
#include "shellpinn/autodiff/jet.hpp"
#include "shellpinn/errors.hpp"
#include "shellpinn/geometry/chart.hpp"
#include "shellpinn/mechanics/kinematics.hpp"

namespace shellpinn {

/// One factor of a trial multiplier.
///   xi1_min: xi^1 - lo1     xi1_max: xi^1 - hi1     (likewise for xi2)
///   disc:    (R^2 - |xi|^2) / 2
///   radial:  (xi^1)^2 + (xi^2)^2
enum class TrialFactor { xi1_min, xi1_max, xi2_min, xi2_max, disc, radial };

inline TrialFactor trial_factor_from_string(std::string_view s) {
  if (s == "xi1_min") return TrialFactor::xi1_min;
  if (s == "xi1_max") return TrialFactor::xi1_max;
  if (s == "xi2_min") return TrialFactor::xi2_min;
  if (s == "xi2_max") return TrialFactor::xi2_max;
  if (s == "disc") return TrialFactor::disc;
  if (s == "radial") return TrialFactor::radial;
  throw ConfigError("trial", "unknown trial factor '" + std::string(s) + "'");
}

inline std::string_view to_string(TrialFactor f) {
  switch (f) {
    case TrialFactor::xi1_min: return "xi1_min";
    case TrialFactor::xi1_max: return "xi1_max";
    case TrialFactor::xi2_min: return "xi2_min";
    case TrialFactor::xi2_max: return "xi2_max";
    case TrialFactor::disc: return "disc";
    case TrialFactor::radial: return "radial";
  }
  return "?";
}

/// Multiplier phi(xi) as a product of factors; an empty product is 1.
struct TrialProduct {
  std::vector<TrialFactor> factors;

  /// Parses "1" or factors joined by '*', e.g. "xi1_min*xi1_max".
  static TrialProduct parse(std::string_view s) {
    TrialProduct t;
    if (s == "1" || s.empty()) return t;
    std::size_t start = 0;
    while (start <= s.size()) {
      const std::size_t end = std::min(s.find('*', start), s.size());
      t.factors.push_back(trial_factor_from_string(s.substr(start, end - start)));
      start = end + 1;
    }
    return t;
  }

  std::string str() const {
    if (factors.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i) out += '*';
      out += to_string(factors[i]);
    }
    return out;
  }

  template <class S>
  S eval(const RefDomain& d, const S& x, const S& y) const {
    S v = S(1.0);
    for (TrialFactor f : factors) {
      switch (f) {
        case TrialFactor::xi1_min: v = v * (x - d.lo1); break;
        case TrialFactor::xi1_max: v = v * (x - d.hi1); break;
        case TrialFactor::xi2_min: v = v * (y - d.lo2); break;
        case TrialFactor::xi2_max: v = v * (y - d.hi2); break;
        case TrialFactor::disc: v = v * (0.5 * (d.radius * d.radius - x * x - y * y)); break;
        case TrialFactor::radial: v = v * (x * x + y * y); break;
      }
    }
    return v;
  }
};

/// Per-output multipliers and constant lifts: constrained_i = phi_i * raw_i + lift_i.
struct TrialFunction {
  RefDomain domain;
  std::array<TrialProduct, 5> phi{};
  std::array<double, 5> lift{};

  static TrialFunction none(const RefDomain& d) { return TrialFunction{d, {}, {}}; }

  /// The same multiplier on every output.
  static TrialFunction uniform(const RefDomain& d, const TrialProduct& p) {
    TrialFunction t{d, {}, {}};
    t.phi.fill(p);
    return t;
  }
};

namespace detail {
/// Multiplier value and gradient at xi, expressed in scalar type S. When S is
/// a dual, each entry also carries its own xi-partials.
template <class S>
std::pair<S, Vec2<S>> trial_jet(const TrialProduct& p, const RefDomain& d, ad::Vec2d xi) {
  if (p.factors.empty()) return {S(1.0), {S(0.0), S(0.0)}};
  const ad::Dual2 v = p.eval(d, ad::seed2(xi[0], 0), ad::seed2(xi[1], 1));
  if constexpr (ad::is_dual<S>::value) {
    using P = decltype(S{}.v);
    auto lift = [](const ad::Dual1& x) { return S(P(x.v), P(x.d[0]), P(x.d[1])); };
    return {lift(v.v), {lift(v.d[0]), lift(v.d[1])}};
  } else {
    return {S(v.v.v), {S(v.v.d[0]), S(v.v.d[1])}};
  }
}
}  // namespace detail

template <class S>
FieldJet<S> apply_trial(const FieldJet<S>& raw, const TrialFunction& trial, ad::Vec2d xi) {
  FieldJet<S> out = raw;
  for (int i = 0; i < 5; ++i) {
    const auto& p = trial.phi[i];
    const double lift = trial.lift[i];
    if (p.factors.empty() && lift == 0.0) continue;
    const auto [phi, dphi] = detail::trial_jet<S>(p, trial.domain, xi);
    const S& r = i < 3 ? raw.u_hat[i] : raw.rot[i - 3];
    const Vec2<S>& dr = i < 3 ? raw.du_hat[i] : raw.drot[i - 3];
    S& o = i < 3 ? out.u_hat[i] : out.rot[i - 3];
    Vec2<S>& d = i < 3 ? out.du_hat[i] : out.drot[i - 3];
    if (!p.factors.empty()) {
      o = phi * r;
      for (int b = 0; b < 2; ++b) d[b] = dphi[b] * r + phi * dr[b];
    }
    if (lift != 0.0) o = o + lift;
  }
  return out;
}

}  // namespace shellpinn
