#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shellpinn/autodiff/dual.hpp"
#include "shellpinn/errors.hpp"

namespace shellpinn::ad {

class Tape;

/// Reverse-mode scalar. `index < 0` marks a constant that never touches a tape.
struct Var {
  double value = 0.0;
  std::int32_t index = -1;

  Var() = default;
  Var(double c) : value(c) {}  // NOLINT(google-explicit-constructor)
  Var(double v, std::int32_t i) : value(v), index(i) {}

  bool is_constant() const { return index < 0; }
};

inline double value_of(const Var& x) { return x.value; }

/// Wengert list of scalar operations. Values are stored so the list can be
/// replayed with new leaf values and differentiated in a single reverse sweep.
class Tape {
 public:
  enum class Op : std::uint8_t {
    leaf,
    add,
    sub,
    mul,
    div,
    neg,
    add_c,   // a + c
    mul_c,   // a * c
    div_c,   // a / c
    c_sub,   // c - a
    c_div,   // c / a
    sqrt,
    sin,
    cos,
    exp,
    log,
    tanh,
    erf,
  };

  struct Node {
    Op op;
    std::int32_t a;
    std::int32_t b;
    double c;
  };

  /// Tape receiving operations on the current thread (nullptr when none).
  static Tape*& active() {
    thread_local Tape* tape = nullptr;
    return tape;
  }

  void clear() {
    nodes_.clear();
    values_.clear();
    leaves_.clear();
  }
  void reserve(std::size_t n) {
    nodes_.reserve(n);
    values_.reserve(n);
  }

  Var variable(double value) {
    leaves_.push_back(static_cast<std::int32_t>(nodes_.size()));
    return push(Op::leaf, -1, -1, 0.0, value);
  }

  Var push(Op op, std::int32_t a, std::int32_t b, double c, double value) {
    nodes_.push_back({op, a, b, c});
    values_.push_back(value);
    return {value, static_cast<std::int32_t>(nodes_.size() - 1)};
  }

  std::size_t size() const { return nodes_.size(); }
  std::size_t leaf_count() const { return leaves_.size(); }
  std::span<const std::int32_t> leaves() const { return leaves_; }

  /// Reverse sweep from `output`; returns adjoints for every node up to it.
  void adjoints(const Var& output, std::vector<double>& adj) const {
    adj.assign(nodes_.size(), 0.0);
    if (output.is_constant()) return;
    adj[output.index] = 1.0;
    for (std::int32_t i = output.index; i >= 0; --i) {
      const double g = adj[i];
      if (g == 0.0) continue;
      const Node& n = nodes_[i];
      switch (n.op) {
        case Op::leaf:
          break;
        case Op::add:
          adj[n.a] += g;
          adj[n.b] += g;
          break;
        case Op::sub:
          adj[n.a] += g;
          adj[n.b] -= g;
          break;
        case Op::mul:
          adj[n.a] += g * values_[n.b];
          adj[n.b] += g * values_[n.a];
          break;
        case Op::div: {
          const double inv = 1.0 / values_[n.b];
          adj[n.a] += g * inv;
          adj[n.b] -= g * values_[i] * inv;
          break;
        }
        case Op::neg:
          adj[n.a] -= g;
          break;
        case Op::add_c:
          adj[n.a] += g;
          break;
        case Op::mul_c:
          adj[n.a] += g * n.c;
          break;
        case Op::div_c:
          adj[n.a] += g / n.c;
          break;
        case Op::c_sub:
          adj[n.a] -= g;
          break;
        case Op::c_div:
          adj[n.a] -= g * values_[i] / values_[n.a];
          break;
        case Op::sqrt:
          adj[n.a] += g * 0.5 / values_[i];
          break;
        case Op::sin:
          adj[n.a] += g * std::cos(values_[n.a]);
          break;
        case Op::cos:
          adj[n.a] -= g * std::sin(values_[n.a]);
          break;
        case Op::exp:
          adj[n.a] += g * values_[i];
          break;
        case Op::log:
          adj[n.a] += g / values_[n.a];
          break;
        case Op::tanh:
          adj[n.a] += g * (1.0 - values_[i] * values_[i]);
          break;
        case Op::erf:
          adj[n.a] += g * 1.1283791670955125739 * std::exp(-values_[n.a] * values_[n.a]);
          break;
      }
    }
  }

  /// Re-evaluates every node with new leaf values; returns the value of `output`.
  double replay(std::span<const double> leaf_values, const Var& output) {
    if (leaf_values.size() != leaves_.size()) {
      throw DimensionError("tape replay: expected " + std::to_string(leaves_.size()) +
                           " leaf values, got " + std::to_string(leaf_values.size()));
    }
    std::size_t next_leaf = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      const double a = n.a >= 0 ? values_[n.a] : 0.0;
      const double b = n.b >= 0 ? values_[n.b] : 0.0;
      double& out = values_[i];
      switch (n.op) {
        case Op::leaf: out = leaf_values[next_leaf++]; break;
        case Op::add: out = a + b; break;
        case Op::sub: out = a - b; break;
        case Op::mul: out = a * b; break;
        case Op::div: out = a / b; break;
        case Op::neg: out = -a; break;
        case Op::add_c: out = a + n.c; break;
        case Op::mul_c: out = a * n.c; break;
        case Op::div_c: out = a / n.c; break;
        case Op::c_sub: out = n.c - a; break;
        case Op::c_div: out = n.c / a; break;
        case Op::sqrt: out = std::sqrt(a); break;
        case Op::sin: out = std::sin(a); break;
        case Op::cos: out = std::cos(a); break;
        case Op::exp: out = std::exp(a); break;
        case Op::log: out = std::log(a); break;
        case Op::tanh: out = std::tanh(a); break;
        case Op::erf: out = std::erf(a); break;
      }
    }
    return output.is_constant() ? output.value : values_[output.index];
  }

 private:
  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<std::int32_t> leaves_;
};

/// Installs a tape as the active one for the current thread for its lifetime.
class ScopedTape {
 public:
  explicit ScopedTape(Tape& tape) : previous_(Tape::active()) { Tape::active() = &tape; }
  ~ScopedTape() { Tape::active() = previous_; }
  ScopedTape(const ScopedTape&) = delete;
  ScopedTape& operator=(const ScopedTape&) = delete;

 private:
  Tape* previous_;
};

namespace detail {
inline Tape& tape_or_throw() {
  Tape* t = Tape::active();
  if (t == nullptr) throw Error("autodiff", "operation on a tape variable without an active tape");
  return *t;
}
inline Var unary(Tape::Op op, const Var& a, double value) {
  if (a.is_constant()) return Var(value);
  return tape_or_throw().push(op, a.index, -1, 0.0, value);
}
inline Var with_constant(Tape::Op op, const Var& a, double c, double value) {
  return tape_or_throw().push(op, a.index, -1, c, value);
}
}  // namespace detail

inline Var operator+(const Var& a, const Var& b) {
  const double v = a.value + b.value;
  if (a.is_constant()) {
    return b.is_constant() ? Var(v) : detail::with_constant(Tape::Op::add_c, b, a.value, v);
  }
  if (b.is_constant()) return detail::with_constant(Tape::Op::add_c, a, b.value, v);
  return detail::tape_or_throw().push(Tape::Op::add, a.index, b.index, 0.0, v);
}
inline Var operator-(const Var& a, const Var& b) {
  const double v = a.value - b.value;
  if (a.is_constant()) {
    return b.is_constant() ? Var(v) : detail::with_constant(Tape::Op::c_sub, b, a.value, v);
  }
  if (b.is_constant()) return detail::with_constant(Tape::Op::add_c, a, -b.value, v);
  return detail::tape_or_throw().push(Tape::Op::sub, a.index, b.index, 0.0, v);
}
inline Var operator*(const Var& a, const Var& b) {
  const double v = a.value * b.value;
  if (a.is_constant()) {
    if (b.is_constant() || a.value == 0.0) return Var(v);
    return detail::with_constant(Tape::Op::mul_c, b, a.value, v);
  }
  if (b.is_constant()) {
    if (b.value == 0.0) return Var(v);
    return detail::with_constant(Tape::Op::mul_c, a, b.value, v);
  }
  return detail::tape_or_throw().push(Tape::Op::mul, a.index, b.index, 0.0, v);
}
inline Var operator/(const Var& a, const Var& b) {
  const double v = a.value / b.value;
  if (b.is_constant()) {
    if (a.is_constant()) return Var(v);
    return detail::with_constant(Tape::Op::div_c, a, b.value, v);
  }
  if (a.is_constant()) {
    if (a.value == 0.0) return Var(v);
    return detail::with_constant(Tape::Op::c_div, b, a.value, v);
  }
  return detail::tape_or_throw().push(Tape::Op::div, a.index, b.index, 0.0, v);
}
inline Var operator-(const Var& a) { return detail::unary(Tape::Op::neg, a, -a.value); }

inline Var operator+(const Var& a, double c) { return a + Var(c); }
inline Var operator+(double c, const Var& a) { return Var(c) + a; }
inline Var operator-(const Var& a, double c) { return a - Var(c); }
inline Var operator-(double c, const Var& a) { return Var(c) - a; }
inline Var operator*(const Var& a, double c) { return a * Var(c); }
inline Var operator*(double c, const Var& a) { return Var(c) * a; }
inline Var operator/(const Var& a, double c) { return a / Var(c); }
inline Var operator/(double c, const Var& a) { return Var(c) / a; }

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }

inline Var sqrt(const Var& a) {
  if (!(a.value >= 0.0)) throw EvaluationError("sqrt: negative argument " + std::to_string(a.value));
  if (!a.is_constant() && a.value == 0.0) throw EvaluationError("sqrt: derivative undefined at 0");
  return detail::unary(Tape::Op::sqrt, a, std::sqrt(a.value));
}
inline Var log(const Var& a) {
  if (!(a.value > 0.0)) throw EvaluationError("log: non-positive argument " + std::to_string(a.value));
  return detail::unary(Tape::Op::log, a, std::log(a.value));
}
inline Var sin(const Var& a) { return detail::unary(Tape::Op::sin, a, std::sin(a.value)); }
inline Var cos(const Var& a) { return detail::unary(Tape::Op::cos, a, std::cos(a.value)); }
inline Var exp(const Var& a) { return detail::unary(Tape::Op::exp, a, std::exp(a.value)); }
inline Var tanh(const Var& a) { return detail::unary(Tape::Op::tanh, a, std::tanh(a.value)); }
inline Var erf(const Var& a) { return detail::unary(Tape::Op::erf, a, std::erf(a.value)); }

/// A parameter vector registered as the leaves of a tape. Any scalar computed
/// from `parameters()` while the tape is active can be differentiated with
/// `param_grad`.
class ParamTape {
 public:
  explicit ParamTape(std::span<const double> params) : scope_(tape_) {
    tape_.reserve(params.size() * 8);
    vars_.reserve(params.size());
    for (double p : params) vars_.push_back(tape_.variable(p));
  }

  std::span<const Var> parameters() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  Tape& tape() { return tape_; }
  const Tape& tape() const { return tape_; }

  double replay(std::span<const double> params, const Var& loss) { return tape_.replay(params, loss); }

 private:
  Tape tape_;
  ScopedTape scope_;
  std::vector<Var> vars_;
};

/// d(loss)/d(parameters) for a loss recorded on `tape`.
inline std::vector<double> param_grad(const Var& loss, const ParamTape& tape,
                                      std::size_t expected_parameters) {
  if (expected_parameters != tape.size()) {
    throw DimensionError("param_grad: tape holds " + std::to_string(tape.size()) +
                         " parameters, caller expects " + std::to_string(expected_parameters));
  }
  std::vector<double> adj;
  tape.tape().adjoints(loss, adj);
  std::vector<double> grad(tape.size(), 0.0);
  if (loss.is_constant()) return grad;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const auto idx = static_cast<std::size_t>(tape.parameters()[i].index);
    if (idx < adj.size()) grad[i] = adj[idx];
  }
  return grad;
}

/// Convenience: evaluates `loss(params_as_vars)` on a fresh tape and returns its gradient.
template <class F>
std::vector<double> param_grad(F&& loss, std::span<const double> params) {
  ParamTape tape(params);
  Var l = loss(tape.parameters());
  return param_grad(l, tape, params.size());
}

}  // namespace shellpinn::ad
