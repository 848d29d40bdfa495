#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shellpinn/errors.hpp"
#include "shellpinn/geometry/geometry.hpp"
#include "shellpinn/network/batch_jet.hpp"
#include "shellpinn/network/mlp.hpp"

namespace shellpinn {

/// Thickness network t(xi) = t_min + (t_max - t_min) sigmoid(raw(xi)).
class ThicknessField {
 public:
  ThicknessField() = default;
  ThicknessField(Mlp net, double t_min, double t_max) : net_(std::move(net)), t_min_(t_min), t_max_(t_max) {
    if (net_.inputs() != 2 || net_.outputs() != 1) throw DimensionError("thickness network must map 2 inputs to 1 output");
    if (!(t_min_ > 0.0)) throw ConfigError("t_min", "must be positive");
    if (!(t_max_ > t_min_)) throw ConfigError("t_max", "must exceed t_min");
  }

  /// Network whose output starts uniform at t0: hidden layers are randomly
  /// initialised, the output layer has zero weights and the matching bias.
  static ThicknessField uniform(const std::vector<int>& widths, Activation act, std::uint64_t seed, double t_min,
                                double t_max, double t0) {
    if (!(t0 > t_min && t0 < t_max)) {
      throw ConfigError("t_init", "initial thickness " + std::to_string(t0) + " must lie strictly inside (t_min, t_max)");
    }
    Mlp net = init(widths, act, seed);
    const std::size_t L = net.layers() - 1;
    auto p = net.parameters();
    for (std::size_t k = net.weight_offset(L); k < net.bias_offset(L); ++k) p[k] = 0.0;
    const double s = (t0 - t_min) / (t_max - t_min);
    p[net.bias_offset(L)] = std::log(s / (1.0 - s));
    return ThicknessField(std::move(net), t_min, t_max);
  }

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }

  double squash(double raw) const { return t_min_ + (t_max_ - t_min_) / (1.0 + std::exp(-raw)); }

  double operator()(Vec2d xi) const { return squash(net_.eval(xi[0], xi[1])[0]); }

  std::vector<double> values(std::span<const Vec2d> pts) const {
    BatchJet jet;
    jet.forward(net_, pts, 1);
    std::vector<double> out(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) out[j] = squash(jet.output(kV)(0, static_cast<Eigen::Index>(j)));
    return out;
  }

 private:
  Mlp net_;
  double t_min_ = 0.0;
  double t_max_ = 0.0;
};

/// Thickness and its first partials over a batch of points, with the reverse
/// pass to the thickness network's parameters.
class ThicknessJet {
 public:
  void forward(const ThicknessField& f, std::span<const Vec2d> pts) {
    jet_.forward(f.net(), pts, 1);
    const auto n = static_cast<Eigen::Index>(pts.size());
    const double span = f.t_max() - f.t_min();
    t.resize(n);
    t1.resize(n);
    t2.resize(n);
    ds_.resize(n);
    dds_.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double s = 1.0 / (1.0 + std::exp(-jet_.output(kV)(0, j)));
      const double d = s * (1.0 - s);
      t(j) = f.t_min() + span * s;
      ds_(j) = span * d;
      dds_(j) = span * d * (1.0 - 2.0 * s);
      t1(j) = ds_(j) * jet_.output(kD1)(0, j);
      t2(j) = ds_(j) * jet_.output(kD2)(0, j);
    }
  }

  /// Adds d(loss)/d(parameters) given the adjoints of t, t_1 and t_2.
  void backward(const ThicknessField& f, const Eigen::RowVectorXd& tb, const Eigen::RowVectorXd& t1b,
                const Eigen::RowVectorXd& t2b, std::span<double> grad) const {
    const auto& r1 = jet_.output(kD1);
    const auto& r2 = jet_.output(kD2);
    std::vector<Eigen::MatrixXd> adj(3, Eigen::MatrixXd(1, t.size()));
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      adj[kV](0, j) = ds_(j) * tb(j) + dds_(j) * (r1(0, j) * t1b(j) + r2(0, j) * t2b(j));
      adj[kD1](0, j) = ds_(j) * t1b(j);
      adj[kD2](0, j) = ds_(j) * t2b(j);
    }
    jet_.backward(f.net(), adj, grad);
  }

  Eigen::RowVectorXd t, t1, t2;

 private:
  BatchJet jet_;
  Eigen::RowVectorXd ds_, dds_;
};

}  // namespace shellpinn
