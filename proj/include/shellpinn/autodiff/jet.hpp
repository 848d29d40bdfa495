#pragma once

#include <array>
#include <optional>
#include <vector>

#include "shellpinn/autodiff/dual.hpp"
#include "shellpinn/autodiff/tape.hpp"

namespace shellpinn::ad {

using Vec2d = std::array<double, 2>;
using Mat2d = std::array<std::array<double, 2>, 2>;

/// Value and input partials of a map R^2 -> R^n at one point.
struct Jet2 {
  std::vector<double> value;
  std::vector<Vec2d> d1;                 // d1[i][a] = d f_i / d xi^a
  std::optional<std::vector<Mat2d>> d2;  // d2[i][a][b] = d^2 f_i / d xi^a d xi^b

  std::size_t size() const { return value.size(); }
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

/// Second-order seeding of coordinate `index` at `x`.
inline Dual2 seed2(double x, int index) {
  return {seed(x, index), Dual1(index == 0 ? 1.0 : 0.0), Dual1(index == 1 ? 1.0 : 0.0)};
}

/// Evaluates `f` (a generic callable taking two scalars and returning a
/// container of scalars) together with its partials up to `order` (1 or 2).
template <class F>
Jet2 jet_eval(F&& f, Vec2d xi, int order) {
  if (order != 1 && order != 2) throw Error("autodiff", "jet_eval: order must be 1 or 2");
  Jet2 jet;
  if (order == 1) {
    const auto out = f(seed(xi[0], 0), seed(xi[1], 1));
    for (const auto& o : out) {
      jet.value.push_back(o.v);
      jet.d1.push_back({o.d[0], o.d[1]});
    }
    return jet;
  }
  const auto out = f(seed2(xi[0], 0), seed2(xi[1], 1));
  std::vector<Mat2d> d2;
  for (const auto& o : out) {
    jet.value.push_back(o.v.v);
    jet.d1.push_back({o.v.d[0], o.v.d[1]});
    d2.push_back({{{o.d[0].d[0], o.d[0].d[1]}, {o.d[1].d[0], o.d[1].d[1]}}});
  }
  jet.d2 = std::move(d2);
  return jet;
}

/// Converts between scalar types of equal differential structure
/// (double -> Var, Dual<double> -> Dual<Var>, ...). Derivative parts become constants.
template <class To>
struct ScalarCast {
  static To from(double x) { return To(x); }
};
template <class T>
struct ScalarCast<Dual<T>> {
  static Dual<T> from(double x) { return Dual<T>(ScalarCast<T>::from(x)); }
  template <class U>
  static Dual<T> from(const Dual<U>& x) {
    return {ScalarCast<T>::from(x.v), ScalarCast<T>::from(x.d[0]), ScalarCast<T>::from(x.d[1])};
  }
};

template <class To, class From>
To scalar_cast(const From& x) {
  return ScalarCast<To>::from(x);
}

}  // namespace shellpinn::ad
