#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shellpinn/autodiff/dual.hpp"
#include "shellpinn/autodiff/jet.hpp"
#include "shellpinn/errors.hpp"

namespace shellpinn {

enum class Activation { gelu, tanh };

inline std::string_view to_string(Activation a) { return a == Activation::gelu ? "gelu" : "tanh"; }

inline Activation activation_from_string(std::string_view s) {
  if (s == "gelu") return Activation::gelu;
  if (s == "tanh") return Activation::tanh;
  throw ConfigError("activation", "expected 'gelu' or 'tanh', got '" + std::string(s) + "'");
}

template <class S>
S activate(Activation a, const S& x) {
  return a == Activation::gelu ? ad::gelu(x) : ad::tanh(x);
}

/// Fully connected network R^2 -> R^n. Parameters are stored flat, layer by
/// layer, each layer as W (out x in, row-major) followed by b.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> widths, Activation act) : widths_(std::move(widths)), act_(act) {
    if (widths_.size() < 2) throw ConfigError("width", "network needs at least an input and an output layer");
    for (int w : widths_)
      if (w <= 0) throw ConfigError("width", "layer widths must be positive");
    params_.assign(count_parameters(widths_), 0.0);
  }

  static std::size_t count_parameters(const std::vector<int>& widths) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l)
      n += static_cast<std::size_t>(widths[l]) * widths[l + 1] + widths[l + 1];
    return n;
  }

  const std::vector<int>& widths() const { return widths_; }
  Activation activation() const { return act_; }
  std::size_t layers() const { return widths_.size() - 1; }
  int inputs() const { return widths_.front(); }
  int outputs() const { return widths_.back(); }
  std::size_t size() const { return params_.size(); }

  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }
  void set_parameters(std::span<const double> p) {
    if (p.size() != params_.size()) {
      throw DimensionError("expected " + std::to_string(params_.size()) + " parameters, got " +
                           std::to_string(p.size()));
    }
    params_.assign(p.begin(), p.end());
  }

  /// Offset of W for layer l (b follows at weight_offset(l) + in*out).
  std::size_t weight_offset(std::size_t l) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < l; ++k)
      off += static_cast<std::size_t>(widths_[k]) * widths_[k + 1] + widths_[k + 1];
    return off;
  }
  std::size_t bias_offset(std::size_t l) const {
    return weight_offset(l) + static_cast<std::size_t>(widths_[l]) * widths_[l + 1];
  }

  /// Forward pass over any scalar, with parameters of type P (double or Var).
  template <class S, class P>
  std::vector<S> eval(std::span<const P> p, const S& x1, const S& x2) const {
    std::vector<S> a{x1, x2};
    std::size_t k = 0;
    for (std::size_t l = 0; l < layers(); ++l) {
      const int in = widths_[l], out = widths_[l + 1];
      std::vector<S> z(out);
      for (int o = 0; o < out; ++o) {
        S acc = S(p[k + static_cast<std::size_t>(o) * in]) * a[0];
        for (int i = 1; i < in; ++i) acc = acc + S(p[k + static_cast<std::size_t>(o) * in + i]) * a[i];
        z[o] = acc;
      }
      k += static_cast<std::size_t>(in) * out;
      for (int o = 0; o < out; ++o) {
        z[o] = z[o] + S(p[k + o]);
        if (l + 1 < layers()) z[o] = activate(act_, z[o]);
      }
      k += out;
      a = std::move(z);
    }
    return a;
  }

  template <class S>
  std::vector<S> eval(const S& x1, const S& x2) const {
    return eval<S, double>(std::span<const double>(params_), x1, x2);
  }

 private:
  std::vector<int> widths_;
  Activation act_ = Activation::gelu;
  std::vector<double> params_;
};

/// Widths [2, width x hidden, outputs].
inline std::vector<int> mlp_widths(int hidden_layers, int width, int outputs = 5) {
  std::vector<int> w{2};
  for (int i = 0; i < hidden_layers; ++i) w.push_back(width);
  w.push_back(outputs);
  return w;
}

/// Glorot-uniform weights and zero biases, deterministic per seed.
inline Mlp init(const std::vector<int>& widths, Activation act, std::uint64_t seed) {
  Mlp net(widths, act);
  std::mt19937_64 rng(seed);
  auto p = net.parameters();
  for (std::size_t l = 0; l < net.layers(); ++l) {
    const int in = widths[l], out = widths[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> u(-limit, limit);
    const std::size_t w0 = net.weight_offset(l);
    for (std::size_t i = 0; i < static_cast<std::size_t>(in) * out; ++i) p[w0 + i] = u(rng);
  }
  return net;
}

/// Network outputs and their input partials at one point.
inline ad::Jet2 forward_jet(const Mlp& net, ad::Vec2d xi, int order) {
  return ad::jet_eval([&](const auto& a, const auto& b) { return net.eval(a, b); }, xi, order);
}

}  // namespace shellpinn
