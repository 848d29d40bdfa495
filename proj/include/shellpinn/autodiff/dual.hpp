#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <numbers>
#include <string>
#include <type_traits>

#include "shellpinn/errors.hpp"

namespace shellpinn::ad {

/// Forward-mode number carrying the partials with respect to the two surface
/// coordinates (xi^1, xi^2). Nesting gives higher orders: the component type
/// of Dual<Dual<double>> holds first partials of first partials.
template <class T>
struct Dual {
  T v{};
  std::array<T, 2> d{};

  Dual() : v(0.0), d{T(0.0), T(0.0)} {}

  template <class U>
    requires std::convertible_to<const U&, T>
  Dual(const U& c) : v(c), d{T(0.0), T(0.0)} {}  // NOLINT(google-explicit-constructor)

  Dual(T value, T d0, T d1) : v(std::move(value)), d{std::move(d0), std::move(d1)} {}

  friend Dual operator+(const Dual& a, const Dual& b) {
    return {a.v + b.v, a.d[0] + b.d[0], a.d[1] + b.d[1]};
  }
  friend Dual operator-(const Dual& a, const Dual& b) {
    return {a.v - b.v, a.d[0] - b.d[0], a.d[1] - b.d[1]};
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    return {a.v * b.v, a.d[0] * b.v + a.v * b.d[0], a.d[1] * b.v + a.v * b.d[1]};
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T q = a.v / b.v;
    return {q, (a.d[0] - q * b.d[0]) / b.v, (a.d[1] - q * b.d[1]) / b.v};
  }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d[0], -a.d[1]}; }

  friend Dual operator+(const Dual& a, double c) { return {a.v + c, a.d[0], a.d[1]}; }
  friend Dual operator+(double c, const Dual& a) { return {c + a.v, a.d[0], a.d[1]}; }
  friend Dual operator-(const Dual& a, double c) { return {a.v - c, a.d[0], a.d[1]}; }
  friend Dual operator-(double c, const Dual& a) { return {c - a.v, -a.d[0], -a.d[1]}; }
  friend Dual operator*(const Dual& a, double c) { return {a.v * c, a.d[0] * c, a.d[1] * c}; }
  friend Dual operator*(double c, const Dual& a) { return {c * a.v, c * a.d[0], c * a.d[1]}; }
  friend Dual operator/(const Dual& a, double c) { return {a.v / c, a.d[0] / c, a.d[1] / c}; }
  friend Dual operator/(double c, const Dual& a) {
    T q = c / a.v;
    return {q, -q * a.d[0] / a.v, -q * a.d[1] / a.v};
  }

  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

/// Innermost floating-point value of a (possibly nested) scalar.
inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

namespace detail {
inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw EvaluationError(std::string(what) + ": non-finite argument");
}
}  // namespace detail

// ---- double primitives (checked, so domain errors never turn into silent NaN)

inline double sqrt(double x) {
  if (!(x >= 0.0)) {
    throw EvaluationError("sqrt: negative argument " + std::to_string(x));
  }
  return std::sqrt(x);
}
inline double log(double x) {
  if (!(x > 0.0)) throw EvaluationError("log: non-positive argument " + std::to_string(x));
  return std::log(x);
}
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double exp(double x) { return std::exp(x); }
inline double tanh(double x) { return std::tanh(x); }
inline double erf(double x) { return std::erf(x); }

// ---- Dual primitives

template <class T>
Dual<T> chain(const Dual<T>& x, T f, const T& df) {
  return {std::move(f), df * x.d[0], df * x.d[1]};
}

template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  if (!(value_of(x.v) > 0.0)) {
    throw EvaluationError("sqrt: derivative undefined at argument " +
                          std::to_string(value_of(x.v)));
  }
  T s = sqrt(x.v);
  return chain(x, s, T(0.5 / s));
}
template <class T>
Dual<T> sin(const Dual<T>& x) {
  return chain(x, sin(x.v), cos(x.v));
}
template <class T>
Dual<T> cos(const Dual<T>& x) {
  return chain(x, cos(x.v), T(-sin(x.v)));
}
template <class T>
Dual<T> exp(const Dual<T>& x) {
  T e = exp(x.v);
  return chain(x, e, e);
}
template <class T>
Dual<T> log(const Dual<T>& x) {
  return chain(x, log(x.v), T(1.0 / x.v));
}
template <class T>
Dual<T> tanh(const Dual<T>& x) {
  T t = tanh(x.v);
  return chain(x, t, T(1.0 - t * t));
}
template <class T>
Dual<T> erf(const Dual<T>& x) {
  constexpr double k = 2.0 / 1.7724538509055160273;  // 2/sqrt(pi)
  return chain(x, erf(x.v), T(k * exp(-(x.v * x.v))));
}

/// Exact GELU, x * Phi(x), for any supported scalar.
template <class S>
S gelu(const S& x) {
  return x * (0.5 * (1.0 + erf(x * (1.0 / std::numbers::sqrt2))));
}

template <class S>
S sigmoid(const S& x) {
  return 1.0 / (1.0 + exp(-x));
}

/// Seed coordinate `index` of a first-order dual.
template <class T>
Dual<T> seed(const T& value, int index) {
  return {value, T(index == 0 ? 1.0 : 0.0), T(index == 1 ? 1.0 : 0.0)};
}

}  // namespace shellpinn::ad
