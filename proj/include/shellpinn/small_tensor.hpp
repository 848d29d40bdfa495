#pragma once

#include <array>

#include "shellpinn/autodiff/jet.hpp"

namespace shellpinn {

// Fixed-size containers generic over the scalar, so the same mechanics code
// runs on double, forward duals and tape variables.
template <class T>
using Vec2 = std::array<T, 2>;
template <class T>
using Vec3 = std::array<T, 3>;
template <class T>
using Mat2 = std::array<std::array<T, 2>, 2>;
template <class T>
using Mat3 = std::array<std::array<T, 3>, 3>;
/// Fourth-order 2-D tensor, indexed [a][b][s][r].
template <class T>
using Tensor4 = std::array<std::array<Mat2<T>, 2>, 2>;

template <class T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <class T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class T>
T norm(const Vec3<T>& a) {
  return ad::sqrt(dot(a, a));
}

template <class T>
Vec3<T> scale(const Vec3<T>& a, const T& s) {
  return {a[0] * s, a[1] * s, a[2] * s};
}

template <class T>
Mat2<T> zero_mat2() {
  return {{{T(0.0), T(0.0)}, {T(0.0), T(0.0)}}};
}

template <class T>
Mat2<T> inverse(const Mat2<T>& m) {
  const T det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return {{{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}}};
}

template <class T>
T det(const Mat2<T>& m) {
  return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

namespace detail {
template <class To, class From>
struct ArrayCast {
  static To apply(const From& x) { return ad::scalar_cast<To>(x); }
};
template <class To, class From, std::size_t N>
struct ArrayCast<std::array<To, N>, std::array<From, N>> {
  static std::array<To, N> apply(const std::array<From, N>& a) {
    std::array<To, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = ArrayCast<To, From>::apply(a[i]);
    return out;
  }
};
}  // namespace detail

/// Element-wise scalar conversion of nested fixed arrays.
template <class To, class From>
To tensor_cast(const From& x) {
  return detail::ArrayCast<To, From>::apply(x);
}

}  // namespace shellpinn
