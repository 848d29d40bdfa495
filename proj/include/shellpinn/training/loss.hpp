#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shellpinn/errors.hpp"
#include "shellpinn/geometry/geometry.hpp"
#include "shellpinn/network/batch_jet.hpp"
#include "shellpinn/network/mlp.hpp"
#include "shellpinn/sampling/sampling.hpp"
#include "shellpinn/training/parallel.hpp"
#include "shellpinn/training/point_ops.hpp"
#include "shellpinn/training/problem.hpp"

namespace shellpinn {

enum class LossKind { weak, strong };

inline std::string_view to_string(LossKind k) { return k == LossKind::weak ? "weak" : "strong"; }

inline LossKind loss_kind_from_string(std::string_view s) {
  if (s == "weak") return LossKind::weak;
  if (s == "strong") return LossKind::strong;
  throw ConfigError("loss", "expected 'weak' or 'strong', got '" + std::string(s) + "'");
}

/// Total potential energy estimate |omega|/N sum_i (density_i) sqrt(a_i), by part.
struct WeakLoss {
  double membrane = 0.0;
  double bending = 0.0;
  double shear = 0.0;
  double external = 0.0;
  double total = 0.0;

  double internal() const { return membrane + bending + shear; }
  double sum_of_parts() const { return internal() + external; }
};

/// Mean squared residual norms over interior, Neumann and Dirichlet points.
struct StrongLoss {
  double L_r = 0.0;
  double L_bc_N = 0.0;
  double L_bc_D = 0.0;
  double lambda_bc = 1.0;

  double total() const { return L_r + lambda_bc * (L_bc_N + L_bc_D); }
};

/// Loss and parameter gradient of one problem on a fixed point set. Per-point
/// maps from the network jets are precomputed once; evaluation runs over fixed
/// blocks of points whose partial sums are reduced in a fixed order, so results
/// are bitwise independent of the thread count.
class LossEvaluator {
 public:
  static constexpr std::size_t kBlock = 256;

  LossEvaluator(Problem problem, PointSet points, LossKind kind, double lambda_bc = 1.0,
                int threads = thread_count())
      : problem_(std::move(problem)), points_(std::move(points)), kind_(kind), lambda_bc_(lambda_bc),
        threads_(threads) {
    problem_.validate();
    if (points_.interior.empty()) throw ConfigError("n_collocation", "no interior collocation points");
    if (!(lambda_bc_ >= 0.0)) throw ConfigError("lambda_bc", "must be non-negative");
    const RefDomain dom = problem_.chart.domain();
    const double area_w = dom.area() / static_cast<double>(points_.interior.size());
    const double t = problem_.material.t;
    if (kind_ == LossKind::weak) {
      weak_ops_.reserve(points_.interior.size());
      for (const auto& xi : points_.interior) {
        const auto g = build_geometry(problem_.chart, xi);
        weak_ops_.emplace_back(problem_, g, xi, area_w * g.sqrt_a);
      }
      return;
    }
    strong_ops_.reserve(points_.interior.size());
    for (const auto& xi : points_.interior)
      strong_ops_.push_back(strong_point_op(problem_, build_geometry_jet(problem_.chart, xi), xi, t));
    for (const auto& b : points_.neumann) {
      neumann_xi_.push_back(b.xi);
      neumann_ops_.push_back(natural_bc_op(problem_, build_geometry(problem_.chart, b.xi), b, t));
    }
    for (const auto& b : points_.dirichlet) {
      dirichlet_xi_.push_back(b.xi);
      dirichlet_ops_.push_back(dirichlet_op(problem_, b.xi));
    }
  }

  LossKind kind() const { return kind_; }
  const Problem& problem() const { return problem_; }
  const PointSet& points() const { return points_; }
  double lambda_bc() const { return lambda_bc_; }
  void set_threads(int n) { threads_ = n; }

  /// Total loss of the configured kind; the gradient is added to `grad` when non-empty.
  double operator()(const Mlp& net, std::span<double> grad = {}) const {
    return kind_ == LossKind::weak ? weak(net, grad).total : strong(net, grad).total();
  }

  WeakLoss weak(const Mlp& net, std::span<double> grad = {}) const {
    require(LossKind::weak, net, grad);
    constexpr std::size_t kParts = 5;
    const auto sums = run_blocks(weak_ops_.size(), kParts, grad.empty() ? 0 : net.size(),
                                 [&](std::size_t begin, std::size_t end, std::span<double> out) {
                                   weak_block(net, begin, end, out, grad.empty());
                                 });
    add(grad, sums, kParts);
    return {sums[0], sums[1], sums[2], sums[3], sums[4]};
  }

  StrongLoss strong(const Mlp& net, std::span<double> grad = {}) const {
    require(LossKind::strong, net, grad);
    const double ni = static_cast<double>(strong_ops_.size());
    const double nn = static_cast<double>(neumann_ops_.size());
    const double nd = static_cast<double>(dirichlet_ops_.size());
    const bool need_grad = !grad.empty();
    const std::size_t P = need_grad ? net.size() : 0;
    const auto interior = run_blocks(strong_ops_.size(), 1, P, [&](std::size_t b, std::size_t e, auto out) {
      residual_block<kJet2>(net, points_.interior, strong_ops_, b, e, 1.0 / ni, 2, out, need_grad, "interior");
    });
    add(grad, interior, 1);
    StrongLoss L;
    L.lambda_bc = lambda_bc_;
    L.L_r = interior[0] / ni;
    if (nn > 0) {
      const auto s = run_blocks(neumann_ops_.size(), 1, P, [&](std::size_t b, std::size_t e, auto out) {
        residual_block<kJet1>(net, neumann_xi_, neumann_ops_, b, e, lambda_bc_ / nn, 1, out, need_grad,
                              "Neumann boundary");
      });
      add(grad, s, 1);
      L.L_bc_N = s[0] / nn;
    }
    if (nd > 0) {
      const auto s = run_blocks(dirichlet_ops_.size(), 1, P, [&](std::size_t b, std::size_t e, auto out) {
        residual_block<kJet1>(net, dirichlet_xi_, dirichlet_ops_, b, e, lambda_bc_ / nd, 1, out, need_grad,
                              "Dirichlet boundary");
      });
      add(grad, s, 1);
      L.L_bc_D = s[0] / nd;
    }
    return L;
  }

  const std::vector<WeakPointOp>& weak_ops() const { return weak_ops_; }

 private:
  void require(LossKind k, const Mlp& net, std::span<double> grad) const {
    if (k != kind_) {
      throw ConfigError("loss", "evaluator was built for the " + std::string(to_string(kind_)) + " form");
    }
    if (net.inputs() != 2 || net.outputs() != kOutputs) {
      throw DimensionError("loss: network must map 2 inputs to 5 outputs");
    }
    if (!grad.empty() && grad.size() != net.size()) throw DimensionError("loss: gradient length mismatch");
  }

  template <class F>
  std::vector<double> run_blocks(std::size_t n, std::size_t parts, std::size_t P, F&& block) const {
    return block_sums(n, kBlock, parts + P, threads_, std::forward<F>(block));
  }

  static void add(std::span<double> grad, const std::vector<double>& sums, std::size_t parts) {
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += sums[parts + k];
  }

  static void check_finite(double v, const char* where, std::size_t index) {
    if (!std::isfinite(v)) {
      throw TrainingError(std::string("non-finite loss density at ") + where + " point " + std::to_string(index));
    }
  }

  void weak_block(const Mlp& net, std::size_t begin, std::size_t end, std::span<double> out,
                  bool value_only) const {
    BatchJet jet;
    const std::span<const Vec2d> pts(points_.interior.data() + begin, end - begin);
    jet.forward(net, pts, 1);
    std::vector<Eigen::MatrixXd> adj;
    if (!value_only) adj.assign(3, Eigen::MatrixXd::Zero(kOutputs, static_cast<Eigen::Index>(pts.size())));
    const double t = problem_.material.t;
    Eigen::Matrix<double, kJet1, 1> z, dz;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      for (int c = 0; c < 3; ++c) z.segment<kOutputs>(c * kOutputs) = jet.output(c).col(col);
      const WeakPointOp& op = weak_ops_[begin + j];
      const auto d = op.eval(z, t, value_only ? nullptr : &dz);
      const double total = d.internal() + d.external;
      check_finite(total, "interior", begin + j);
      out[0] += op.weight * d.membrane;
      out[1] += op.weight * d.bending;
      out[2] += op.weight * d.shear;
      out[3] += op.weight * d.external;
      out[4] += op.weight * total;
      if (!value_only)
        for (int c = 0; c < 3; ++c) adj[c].col(col) = op.weight * dz.segment<kOutputs>(c * kOutputs);
    }
    if (!value_only) jet.backward(net, adj, out.subspan(5));
  }

  /// Sum of squared residual norms over one block; gradient of scale * sum.
  template <int Cols>
  static void residual_block(const Mlp& net, const std::vector<Vec2d>& xi, const std::vector<ResidualOp<Cols>>& ops,
                             std::size_t begin, std::size_t end, double scale, int order, std::span<double> out,
                             bool need_grad, const char* where) {
    constexpr int nc = Cols / kOutputs;
    BatchJet jet;
    const std::span<const Vec2d> pts(xi.data() + begin, end - begin);
    jet.forward(net, pts, order);
    std::vector<Eigen::MatrixXd> adj;
    if (need_grad) adj.assign(nc, Eigen::MatrixXd::Zero(kOutputs, static_cast<Eigen::Index>(pts.size())));
    Eigen::Matrix<double, Cols, 1> z;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      for (int c = 0; c < nc; ++c) z.template segment<kOutputs>(c * kOutputs) = jet.output(c).col(col);
      const auto& op = ops[begin + j];
      const Eigen::Matrix<double, 5, 1> r = op.M * z + op.c;
      const double sq = r.squaredNorm();
      check_finite(sq, where, begin + j);
      out[0] += sq;
      if (need_grad) {
        const Eigen::Matrix<double, Cols, 1> dz = (2.0 * scale) * (op.M.transpose() * r);
        for (int c = 0; c < nc; ++c) adj[c].col(col) = dz.template segment<kOutputs>(c * kOutputs);
      }
    }
    if (need_grad) jet.backward(net, adj, out.subspan(1));
  }

  Problem problem_;
  PointSet points_;
  LossKind kind_;
  double lambda_bc_;
  int threads_;
  std::vector<WeakPointOp> weak_ops_;
  std::vector<ResidualOp<kJet2>> strong_ops_;
  std::vector<ResidualOp<kJet1>> neumann_ops_;
  std::vector<ResidualOp<kJet1>> dirichlet_ops_;
  std::vector<Vec2d> neumann_xi_;
  std::vector<Vec2d> dirichlet_xi_;
};

}  // namespace shellpinn
