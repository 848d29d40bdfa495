#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "shellpinn/errors.hpp"
#include "shellpinn/network/mlp.hpp"

namespace shellpinn {

/// Jet components of a batched network pass. Order 1 uses the first three.
enum JetComp : int { kV = 0, kD1 = 1, kD2 = 2, kD11 = 3, kD12 = 4, kD22 = 5 };

inline int jet_components(int order) { return order == 1 ? 3 : 6; }

/// Batched forward pass of an Mlp carrying input partials up to second order,
/// with a hand-written reverse pass to the parameters. Each component is a
/// (width x points) matrix.
class BatchJet {
 public:
  using Mat = Eigen::MatrixXd;
  using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  void forward(const Mlp& net, std::span<const ad::Vec2d> pts, int order) {
    if (order != 1 && order != 2) throw Error("autodiff", "BatchJet: order must be 1 or 2");
    if (net.inputs() != 2) throw DimensionError("BatchJet: network must take two inputs");
    order_ = order;
    const int nc = jet_components(order);
    const auto B = static_cast<Eigen::Index>(pts.size());
    const std::size_t L = net.layers();
    act_.assign(L + 1, std::vector<Mat>(nc));
    pre_.assign(L, std::vector<Mat>(nc));
    sig_.assign(L, std::array<Mat, 3>{});

    auto& a0 = act_[0];
    for (int c = 0; c < nc; ++c) a0[c] = Mat::Zero(2, B);
    for (Eigen::Index j = 0; j < B; ++j) {
      a0[kV](0, j) = pts[j][0];
      a0[kV](1, j) = pts[j][1];
    }
    a0[kD1].row(0).setOnes();
    a0[kD2].row(1).setOnes();

    const auto p = net.parameters();
    for (std::size_t l = 0; l < L; ++l) {
      const int in = net.widths()[l], out = net.widths()[l + 1];
      RowMajorMap W(p.data() + net.weight_offset(l), out, in);
      Eigen::Map<const Eigen::VectorXd> b(p.data() + net.bias_offset(l), out);
      auto& Z = pre_[l];
      for (int c = 0; c < nc; ++c) Z[c].noalias() = W * act_[l][c];
      Z[kV].colwise() += b;
      auto& A = act_[l + 1];
      if (l + 1 == L) {
        for (int c = 0; c < nc; ++c) A[c] = Z[c];
        continue;
      }
      Mat s0(out, B);
      auto& [s1, s2, s3] = sig_[l];
      activation_derivatives(net.activation(), Z[kV], s0, s1, s2, s3);
      A[kV] = std::move(s0);
      A[kD1] = s1.cwiseProduct(Z[kD1]);
      A[kD2] = s1.cwiseProduct(Z[kD2]);
      if (order == 2) {
        A[kD11] = (s2.array() * Z[kD1].array().square() + s1.array() * Z[kD11].array()).matrix();
        A[kD12] = (s2.array() * Z[kD1].array() * Z[kD2].array() + s1.array() * Z[kD12].array()).matrix();
        A[kD22] = (s2.array() * Z[kD2].array().square() + s1.array() * Z[kD22].array()).matrix();
      }
    }
  }

  int order() const { return order_; }
  /// Output component c as an (outputs x points) matrix.
  const Mat& output(int c) const { return act_.back()[c]; }

  /// Adds d(loss)/d(parameters) to `grad` given d(loss)/d(output components).
  void backward(const Mlp& net, const std::vector<Mat>& out_adj, std::span<double> grad) const {
    const int nc = jet_components(order_);
    if (static_cast<int>(out_adj.size()) != nc) throw DimensionError("BatchJet::backward: component count");
    if (grad.size() != net.size()) throw DimensionError("BatchJet::backward: gradient length");
    const std::size_t L = net.layers();
    const auto p = net.parameters();
    std::vector<Mat> Abar = out_adj;  // adjoint of the current layer's activation
    std::vector<Mat> Zbar(nc);
    for (std::size_t l = L; l-- > 0;) {
      const int in = net.widths()[l], out = net.widths()[l + 1];
      const auto& Z = pre_[l];
      if (l + 1 == L) {
        Zbar = Abar;
      } else {
        const auto& [s1, s2, s3] = sig_[l];
        const auto S1 = s1.array(), S2 = s2.array();
        Zbar[kV] = (S1 * Abar[kV].array() +
                    S2 * (Z[kD1].array() * Abar[kD1].array() + Z[kD2].array() * Abar[kD2].array()))
                       .matrix();
        Zbar[kD1] = (S1 * Abar[kD1].array()).matrix();
        Zbar[kD2] = (S1 * Abar[kD2].array()).matrix();
        if (order_ == 2) {
          const auto Z1 = Z[kD1].array(), Z2 = Z[kD2].array();
          const auto B11 = Abar[kD11].array(), B12 = Abar[kD12].array(), B22 = Abar[kD22].array();
          Zbar[kV].array() +=
              s3.array() * (Z1.square() * B11 + Z1 * Z2 * B12 + Z2.square() * B22) +
              S2 * (Z[kD11].array() * B11 + Z[kD12].array() * B12 + Z[kD22].array() * B22);
          Zbar[kD1].array() += S2 * (2.0 * Z1 * B11 + Z2 * B12);
          Zbar[kD2].array() += S2 * (2.0 * Z2 * B22 + Z1 * B12);
          Zbar[kD11] = (S1 * B11).matrix();
          Zbar[kD12] = (S1 * B12).matrix();
          Zbar[kD22] = (S1 * B22).matrix();
        }
      }
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gW(
          grad.data() + net.weight_offset(l), out, in);
      Eigen::Map<Eigen::VectorXd> gb(grad.data() + net.bias_offset(l), out);
      for (int c = 0; c < nc; ++c) gW.noalias() += Zbar[c] * act_[l][c].transpose();
      gb += Zbar[kV].rowwise().sum();
      if (l == 0) break;
      RowMajorMap W(p.data() + net.weight_offset(l), out, in);
      for (int c = 0; c < nc; ++c) Abar[c].noalias() = W.transpose() * Zbar[c];
    }
  }

 private:
  static void activation_derivatives(Activation act, const Mat& z, Mat& s0, Mat& s1, Mat& s2, Mat& s3) {
    s1.resize(z.rows(), z.cols());
    s2.resize(z.rows(), z.cols());
    s3.resize(z.rows(), z.cols());
    constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    constexpr double inv_sqrt2pi = 0.3989422804014326779;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const double x = z(i, j);
        if (act == Activation::gelu) {
          const double Phi = 0.5 * (1.0 + std::erf(x * inv_sqrt2));
          const double phi = inv_sqrt2pi * std::exp(-0.5 * x * x);
          s0(i, j) = x * Phi;
          s1(i, j) = Phi + x * phi;
          s2(i, j) = phi * (2.0 - x * x);
          s3(i, j) = phi * (x * x * x - 4.0 * x);
        } else {
          const double t = std::tanh(x);
          const double d = 1.0 - t * t;
          s0(i, j) = t;
          s1(i, j) = d;
          s2(i, j) = -2.0 * t * d;
          s3(i, j) = -2.0 * d * d + 4.0 * t * t * d;
        }
      }
    }
  }

  int order_ = 1;
  std::vector<std::vector<Mat>> act_;  // act_[l][c]: input of layer l (act_[L] = outputs)
  std::vector<std::vector<Mat>> pre_;  // pre-activations of layer l
  std::vector<std::array<Mat, 3>> sig_;  // sigma', sigma'', sigma''' of hidden layers
};

}  // namespace shellpinn
