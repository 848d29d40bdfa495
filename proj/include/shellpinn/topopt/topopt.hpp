#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "shellpinn/errors.hpp"
#include "shellpinn/geometry/geometry.hpp"
#include "shellpinn/network/batch_jet.hpp"
#include "shellpinn/network/mlp.hpp"
#include "shellpinn/sampling/sampling.hpp"
#include "shellpinn/topopt/thickness.hpp"
#include "shellpinn/training/optim.hpp"
#include "shellpinn/training/parallel.hpp"
#include "shellpinn/training/point_ops.hpp"
#include "shellpinn/training/problem.hpp"

namespace shellpinn {

/// Residuals depend on the thickness only through the features
/// t, t_1, t_2, t^3, t^2 t_1, t^2 t_2 (and the load factor t^p).
inline constexpr int kThicknessFeatures = 6;

inline std::array<double, kThicknessFeatures> thickness_features(double t, double t1, double t2) {
  return {t, t1, t2, t * t * t, t * t * t1, t * t * t2};
}

/// Residual r = sum_k T_k (M_k z + c_k) + t^p l, exact for any thickness jet.
template <int Cols>
struct ThicknessResidualOp {
  using Z = Eigen::Matrix<double, Cols, 1>;
  using R = Eigen::Matrix<double, 5, 1>;
  std::array<Eigen::Matrix<double, 5, Cols>, kThicknessFeatures> M;
  std::array<R, kThicknessFeatures> c;
  R load = R::Zero();
  int load_power = 0;

  R eval(const Z& z, double t, double t1, double t2) const {
    const auto T = thickness_features(t, t1, t2);
    R r = std::pow(t, load_power) * load;
    for (int k = 0; k < kThicknessFeatures; ++k) r += T[k] * (M[k] * z + c[k]);
    return r;
  }

  /// Given the adjoint of r, adds the adjoint of z to dz and returns the
  /// adjoints of (t, t_1, t_2).
  std::array<double, 3> pullback(const Z& z, double t, double t1, double t2, const R& rb, Z& dz) const {
    const auto T = thickness_features(t, t1, t2);
    std::array<double, kThicknessFeatures> Tb{};
    for (int k = 0; k < kThicknessFeatures; ++k) {
      dz.noalias() += T[k] * (M[k].transpose() * rb);
      Tb[k] = rb.dot(M[k] * z + c[k]);
    }
    const double lb = load_power > 0 ? load_power * std::pow(t, load_power - 1) * rb.dot(load) : 0.0;
    return {Tb[0] + 3.0 * t * t * Tb[3] + 2.0 * t * (t1 * Tb[4] + t2 * Tb[5]) + lb, Tb[1] + t * t * Tb[4],
            Tb[2] + t * t * Tb[5]};
  }
};

/// Recovers the feature decomposition of `res(problem, z, thickness_jet)` by
/// probing six thickness jets.
template <int Cols, class Res>
ThicknessResidualOp<Cols> thickness_residual_op(const Problem& p, Res&& res) {
  const Problem lin = homogeneous(p);
  Problem unloaded = p;
  unloaded.load.force = {0.0, 0.0, 0.0};
  auto probe = [&](double t, double d1, double d2) {
    const ad::Dual1 tj(t, d1, d2);
    return affine_map<5, Cols>([&](std::span<const double> z) { return res(lin, z, tj); },
                               [&](std::span<const double> z) { return res(unloaded, z, tj); });
  };
  const auto p1 = probe(1, 0, 0), p2 = probe(2, 0, 0), p3 = probe(0, 1, 0), p4 = probe(1, 1, 0),
             p5 = probe(0, 0, 1), p6 = probe(1, 0, 1);
  ThicknessResidualOp<Cols> op;
  op.M[3] = (p2.M - 2.0 * p1.M) / 6.0;
  op.c[3] = (p2.c - 2.0 * p1.c) / 6.0;
  op.M[0] = p1.M - op.M[3];
  op.c[0] = p1.c - op.c[3];
  op.M[1] = p3.M;
  op.c[1] = p3.c;
  op.M[2] = p5.M;
  op.c[2] = p5.c;
  op.M[4] = p4.M - p1.M - p3.M;
  op.c[4] = p4.c - p1.c - p3.c;
  op.M[5] = p6.M - p1.M - p5.M;
  op.c[5] = p6.c - p1.c - p5.c;
  const std::array<double, Cols> zero{};
  const auto full = res(p, std::span<const double>(zero), ad::Dual1(1.0));
  const auto free = res(unloaded, std::span<const double>(zero), ad::Dual1(1.0));
  for (int i = 0; i < 5; ++i) op.load(i) = full[i] - free[i];
  op.load_power = p.load.thickness_power;
  return op;
}

/// Augmented Lagrangian bookkeeping: one multiplier per constraint component
/// (equilibrium residuals point by point, natural boundary residuals, and the
/// volume constraint last).
struct ALState {
  double mu = 1.0;
  std::vector<double> lambda;
  std::vector<double> h;
  double h_inf_prev = std::numeric_limits<double>::infinity();

  ALState() = default;
  ALState(std::size_t constraints, double mu0) : mu(mu0), lambda(constraints, 0.0), h(constraints, 0.0) {
    if (!(mu0 > 0.0)) throw ConfigError("mu_init", "must be positive");
  }
};

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct MuSchedule {
  double growth = 2.0;
  double cap = 1e6;
  /// mu grows when ||h||_inf did not fall below this fraction of its previous value.
  double stagnation = 0.5;
};

/// lambda += 2 mu h with the residuals of the last inner solve; then mu grows
/// if the constraint violation stagnated.
inline void multiplier_update(ALState& s, const MuSchedule& sched = {}) {
  if (s.h.size() != s.lambda.size()) throw DimensionError("multiplier_update: h and lambda differ in length");
  for (std::size_t i = 0; i < s.h.size(); ++i) s.lambda[i] += 2.0 * s.mu * s.h[i];
  const double hn = inf_norm(s.h);
  if (hn > sched.stagnation * s.h_inf_prev) s.mu = std::min(s.mu * sched.growth, sched.cap);
  s.h_inf_prev = hn;
}

/// Value parts of the augmented Lagrangian.
struct ALTerms {
  double compliance = 0.0;
  double volume = 0.0;
  double penalty = 0.0;  // mu sum h^2
  double linear = 0.0;   // sum lambda h
  double total = 0.0;
};

/// Compliance, volume and constraint evaluation for a displacement network tau
/// and a thickness network psi on fixed points. Equilibrium constraints are the
/// strong-form residuals scaled by the square root of each point's quadrature
/// weight, so sum h^2 estimates the integral of |r|^2. Without equilibrium
/// constraints the volume is the only one.
class TopoptEvaluator {
 public:
  static constexpr std::size_t kBlock = 256;

  TopoptEvaluator(Problem problem, PointSet points, bool equilibrium_constraints = true, int threads = thread_count())
      : problem_(std::move(problem)), points_(std::move(points)), equilibrium_(equilibrium_constraints), threads_(threads) {
    problem_.validate();
    if (points_.interior.empty()) throw ConfigError("n_collocation", "no interior collocation points");
    if (!points_.dirichlet.empty()) {
      throw ConfigError("boundary", "topology optimization needs Dirichlet conditions imposed by trial functions");
    }
    const RefDomain dom = problem_.chart.domain();
    const double area_w = dom.area() / static_cast<double>(points_.interior.size());
    for (const auto& xi : points_.interior) {
      const auto g = build_geometry(problem_.chart, xi);
      const double w = area_w * g.sqrt_a;
      weak_ops_.emplace_back(problem_, g, xi, w);
      area_ += w;
      if (!equilibrium_) continue;
      const auto gj = build_geometry_jet(problem_.chart, xi);
      strong_ops_.push_back(thickness_residual_op<kJet2>(
          problem_, [&](const Problem& q, std::span<const double> z, const ad::Dual1& t) {
            return point_strong_residual<double>(z, gj, q, xi, t);
          }));
    }
    std::array<int, 5> per_edge{};
    for (const auto& b : points_.neumann) ++per_edge[static_cast<int>(b.edge)];
    for (const auto& b : points_.neumann) {
      if (!equilibrium_) break;
      const auto g = build_geometry(problem_.chart, b.xi);
      neumann_xi_.push_back(b.xi);
      neumann_scale_.push_back(std::sqrt(edge_length(dom, b.edge) / per_edge[static_cast<int>(b.edge)]));
      neumann_ops_.push_back(thickness_residual_op<kJet1>(
          problem_, [&](const Problem& q, std::span<const double> z, const ad::Dual1& t) {
            return point_natural_bc<double>(z, g, q, b, t.v);
          }));
    }
  }

  const Problem& problem() const { return problem_; }
  const PointSet& points() const { return points_; }
  bool equilibrium_constraints() const { return equilibrium_; }
  void set_threads(int n) { threads_ = n; }
  /// Weight of the relative volume residual inside h. Setting it to
  /// constraint_tol / volume_tol makes one max-norm test check both tolerances.
  double volume_scale() const { return volume_scale_; }
  void set_volume_scale(double s) {
    if (!(s > 0.0)) throw ConfigError("volume_scale", "must be positive");
    volume_scale_ = s;
  }
  /// Quadrature estimate of the midsurface area.
  double area() const { return area_; }
  std::size_t constraint_count() const { return 5 * (strong_ops_.size() + neumann_ops_.size()) + 1; }
  std::size_t equilibrium_count() const { return constraint_count() - 1; }

  /// Internal energy of tau at the thickness of psi.
  double compliance(const Mlp& tau, const ThicknessField& psi) const { return run(tau, psi, nullptr, 0.0, {}, {}, nullptr).compliance; }

  /// Total potential energy of tau at the thickness of psi; its gradient with
  /// respect to tau is added to a non-empty g_tau.
  double potential(const Mlp& tau, const ThicknessField& psi, std::span<double> g_tau = {}) const {
    const bool grad = !g_tau.empty();
    if (grad && g_tau.size() != tau.size()) throw DimensionError("topopt: gradient length mismatch");
    const std::size_t P = grad ? tau.size() : 0;
    const auto s = block_sums(weak_ops_.size(), kBlock, 1 + P, threads_, [&](std::size_t b, std::size_t e, std::span<double> out) {
      const std::span<const Vec2d> pts(points_.interior.data() + b, e - b);
      const auto n = static_cast<Eigen::Index>(pts.size());
      BatchJet zj;
      zj.forward(tau, pts, 1);
      ThicknessJet tj;
      tj.forward(psi, pts);
      std::vector<Eigen::MatrixXd> zb;
      if (grad) zb.assign(3, Eigen::MatrixXd::Zero(kOutputs, n));
      Eigen::Matrix<double, kJet1, 1> z, dz;
      for (Eigen::Index j = 0; j < n; ++j) {
        for (int c = 0; c < 3; ++c) z.segment<kOutputs>(c * kOutputs) = zj.output(c).col(j);
        const WeakPointOp& op = weak_ops_[b + static_cast<std::size_t>(j)];
        const auto d = op.eval(z, tj.t(j), grad ? &dz : nullptr);
        out[0] += op.weight * (d.internal() + d.external);
        if (grad)
          for (int c = 0; c < 3; ++c) zb[c].col(j) = op.weight * dz.segment<kOutputs>(c * kOutputs);
      }
      if (grad) zj.backward(tau, zb, out.subspan(1));
    });
    for (std::size_t k = 0; k < P; ++k) g_tau[k] += s[1 + k];
    return s[0];
  }

  /// |omega|/N sum t(xi_i) sqrt(a_i).
  double volume(const ThicknessField& psi) const {
    const auto t = psi.values(points_.interior);
    const auto s = block_sums(t.size(), kBlock, 1, 1, [&](std::size_t b, std::size_t e, std::span<double> out) {
      for (std::size_t j = b; j < e; ++j) out[0] += weak_ops_[j].weight * t[j];
    });
    return s[0];
  }

  double volume_residual(const ThicknessField& psi, double V0) const { return volume(psi) - V0; }

  /// All constraint values h: equilibrium components, then the relative volume
  /// residual (V - V0) / V0 times volume_scale().
  std::vector<double> constraints(const Mlp& tau, const ThicknessField& psi, double V0) const {
    std::vector<double> h(constraint_count());
    run(tau, psi, nullptr, V0, {}, {}, &h);
    return h;
  }

  /// J + mu sum h^2 + sum lambda h. Gradients are added to non-empty spans.
  ALTerms al_loss(const Mlp& tau, const ThicknessField& psi, const ALState& st, double V0,
                  std::span<double> g_tau = {}, std::span<double> g_psi = {}, std::vector<double>* h = nullptr) const {
    if (st.lambda.size() != constraint_count()) throw DimensionError("al_loss: multiplier count mismatch");
    return run(tau, psi, &st, V0, g_tau, g_psi, h);
  }

 private:
  static double edge_length(const RefDomain& d, Edge e) {
    switch (e) {
      case Edge::xi1_min:
      case Edge::xi1_max: return d.hi2 - d.lo2;
      case Edge::xi2_min:
      case Edge::xi2_max: return d.hi1 - d.lo1;
      case Edge::circle: return 2.0 * std::numbers::pi * d.radius;
    }
    return 0.0;
  }

  /// Output layout of each block: [J, V, penalty, linear, grad_tau, grad_psi, dV/dpsi].
  ALTerms run(const Mlp& tau, const ThicknessField& psi, const ALState* st, double V0, std::span<double> g_tau,
              std::span<double> g_psi, std::vector<double>* h) const {
    if (tau.inputs() != 2 || tau.outputs() != kOutputs) throw DimensionError("topopt: displacement network must map 2 inputs to 5 outputs");
    const bool grad = !g_tau.empty() || !g_psi.empty();
    if (grad && (g_tau.size() != tau.size() || g_psi.size() != psi.net().size())) {
      throw DimensionError("topopt: gradient length mismatch");
    }
    const std::size_t P = grad ? tau.size() : 0, Q = grad ? psi.net().size() : 0;
    const std::size_t width = 4 + P + 2 * Q;
    const auto in = block_sums(weak_ops_.size(), kBlock, width, threads_, [&](std::size_t b, std::size_t e, std::span<double> out) {
      interior_block(tau, psi, st, b, e, out, grad, P, Q, h);
    });
    const auto bd = block_sums(neumann_ops_.size(), kBlock, width, threads_, [&](std::size_t b, std::size_t e, std::span<double> out) {
      boundary_block(tau, psi, st, b, e, out, grad, P, Q, h);
    });
    ALTerms r;
    r.compliance = in[0];
    r.volume = in[1];
    r.penalty = in[2] + bd[2];
    r.linear = in[3] + bd[3];
    const double hv = volume_scale_ * (r.volume - V0) / V0;
    if (h) h->back() = hv;
    if (st) {
      r.penalty += st->mu * hv * hv;
      r.linear += st->lambda.back() * hv;
    }
    r.total = r.compliance + r.penalty + r.linear;
    if (!std::isfinite(r.total)) throw TrainingError("topopt: non-finite augmented Lagrangian");
    if (grad) {
      const double vb = st ? volume_scale_ * (2.0 * st->mu * hv + st->lambda.back()) / V0 : 0.0;
      for (std::size_t k = 0; k < P; ++k) g_tau[k] += in[4 + k] + bd[4 + k];
      for (std::size_t k = 0; k < Q; ++k)
        g_psi[k] += in[4 + P + k] + bd[4 + P + k] + vb * (in[4 + P + Q + k] + bd[4 + P + Q + k]);
    }
    return r;
  }

  void interior_block(const Mlp& tau, const ThicknessField& psi, const ALState* st, std::size_t begin, std::size_t end,
                      std::span<double> out, bool grad, std::size_t P, std::size_t Q, std::vector<double>* h) const {
    const std::span<const Vec2d> pts(points_.interior.data() + begin, end - begin);
    const auto n = static_cast<Eigen::Index>(pts.size());
    BatchJet zj;
    zj.forward(tau, pts, 2);
    ThicknessJet tj;
    tj.forward(psi, pts);
    std::vector<Eigen::MatrixXd> zb;
    Eigen::RowVectorXd tb, t1b, t2b, vb;
    if (grad) {
      zb.assign(6, Eigen::MatrixXd::Zero(kOutputs, n));
      tb = t1b = t2b = vb = Eigen::RowVectorXd::Zero(n);
    }
    Eigen::Matrix<double, kJet2, 1> z, dz;
    Eigen::Matrix<double, kJet1, 1> dzw;
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::size_t i = begin + static_cast<std::size_t>(j);
      for (int c = 0; c < 6; ++c) z.segment<kOutputs>(c * kOutputs) = zj.output(c).col(j);
      const double t = tj.t(j), t1 = tj.t1(j), t2 = tj.t2(j);
      const WeakPointOp& wop = weak_ops_[i];
      double dt = 0.0;
      const Eigen::Matrix<double, kJet1, 1> z1 = z.head<kJet1>();
      const auto d = wop.eval(z1, t, grad ? &dzw : nullptr, grad ? &dt : nullptr);
      if (grad) {
        dzw -= std::pow(t, wop.load_power) * wop.g.transpose();
        dt -= wop.load_power * d.external / t;
      }
      out[0] += wop.weight * d.internal();
      out[1] += wop.weight * t;
      if (!std::isfinite(d.internal())) throw TrainingError("topopt: non-finite density at interior point " + std::to_string(i));
      if (grad) vb(j) = wop.weight;
      if (!equilibrium_) {
        if (grad) {
          dz.setZero();
          dz.head<kJet1>() = wop.weight * dzw;
          for (int c = 0; c < 6; ++c) zb[c].col(j) = dz.segment<kOutputs>(c * kOutputs);
          tb(j) = wop.weight * dt;
        }
        continue;
      }
      const double s = std::sqrt(wop.weight);
      const Eigen::Matrix<double, 5, 1> hv = s * strong_ops_[i].eval(z, t, t1, t2);
      if (!hv.allFinite()) throw TrainingError("topopt: non-finite residual at interior point " + std::to_string(i));
      if (h)
        for (int k = 0; k < 5; ++k) (*h)[5 * i + k] = hv(k);
      Eigen::Matrix<double, 5, 1> lam = Eigen::Matrix<double, 5, 1>::Zero();
      if (st) {
        for (int k = 0; k < 5; ++k) lam(k) = st->lambda[5 * i + k];
        out[2] += st->mu * hv.squaredNorm();
        out[3] += lam.dot(hv);
      }
      if (!grad) continue;
      dz.setZero();
      dz.head<kJet1>() = wop.weight * dzw;
      std::array<double, 3> tbar{wop.weight * dt, 0.0, 0.0};
      if (st) {
        const Eigen::Matrix<double, 5, 1> rb = s * (2.0 * st->mu * hv + lam);
        const auto a = strong_ops_[i].pullback(z, t, t1, t2, rb, dz);
        for (int k = 0; k < 3; ++k) tbar[k] += a[k];
      }
      for (int c = 0; c < 6; ++c) zb[c].col(j) = dz.segment<kOutputs>(c * kOutputs);
      tb(j) = tbar[0];
      t1b(j) = tbar[1];
      t2b(j) = tbar[2];
    }
    if (!grad) return;
    zj.backward(tau, zb, out.subspan(4, P));
    tj.backward(psi, tb, t1b, t2b, out.subspan(4 + P, Q));
    const Eigen::RowVectorXd zero = Eigen::RowVectorXd::Zero(n);
    tj.backward(psi, vb, zero, zero, out.subspan(4 + P + Q, Q));
  }

  void boundary_block(const Mlp& tau, const ThicknessField& psi, const ALState* st, std::size_t begin, std::size_t end,
                      std::span<double> out, bool grad, std::size_t P, std::size_t Q, std::vector<double>* h) const {
    const std::span<const Vec2d> pts(neumann_xi_.data() + begin, end - begin);
    const auto n = static_cast<Eigen::Index>(pts.size());
    BatchJet zj;
    zj.forward(tau, pts, 1);
    ThicknessJet tj;
    tj.forward(psi, pts);
    std::vector<Eigen::MatrixXd> zb;
    Eigen::RowVectorXd tb, t1b, t2b;
    if (grad && st) {
      zb.assign(3, Eigen::MatrixXd::Zero(kOutputs, n));
      tb = t1b = t2b = Eigen::RowVectorXd::Zero(n);
    }
    const std::size_t off = 5 * strong_ops_.size();
    Eigen::Matrix<double, kJet1, 1> z, dz;
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::size_t i = begin + static_cast<std::size_t>(j);
      for (int c = 0; c < 3; ++c) z.segment<kOutputs>(c * kOutputs) = zj.output(c).col(j);
      const double t = tj.t(j), t1 = tj.t1(j), t2 = tj.t2(j);
      const double s = neumann_scale_[i];
      const Eigen::Matrix<double, 5, 1> hv = s * neumann_ops_[i].eval(z, t, t1, t2);
      if (!hv.allFinite()) throw TrainingError("topopt: non-finite residual at Neumann boundary point " + std::to_string(i));
      if (h)
        for (int k = 0; k < 5; ++k) (*h)[off + 5 * i + k] = hv(k);
      if (!st) continue;
      Eigen::Matrix<double, 5, 1> lam;
      for (int k = 0; k < 5; ++k) lam(k) = st->lambda[off + 5 * i + k];
      out[2] += st->mu * hv.squaredNorm();
      out[3] += lam.dot(hv);
      if (!grad) continue;
      dz.setZero();
      const auto a = neumann_ops_[i].pullback(z, t, t1, t2, s * (2.0 * st->mu * hv + lam), dz);
      for (int c = 0; c < 3; ++c) zb[c].col(j) = dz.segment<kOutputs>(c * kOutputs);
      tb(j) = a[0];
      t1b(j) = a[1];
      t2b(j) = a[2];
    }
    if (!grad || !st) return;
    zj.backward(tau, zb, out.subspan(4, P));
    tj.backward(psi, tb, t1b, t2b, out.subspan(4 + P, Q));
  }

  Problem problem_;
  PointSet points_;
  bool equilibrium_ = true;
  int threads_;
  double volume_scale_ = 1.0;
  double area_ = 0.0;
  std::vector<WeakPointOp> weak_ops_;
  std::vector<ThicknessResidualOp<kJet2>> strong_ops_;
  std::vector<ThicknessResidualOp<kJet1>> neumann_ops_;
  std::vector<Vec2d> neumann_xi_;
  std::vector<double> neumann_scale_;
};

}  // namespace shellpinn

namespace shellpinn {

struct TopoptConfig {
  double V0 = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double mu_init = 1.0;
  int outer_iters = 30;
  int inner_epochs = 20;
  /// Feasibility thresholds: max |h| over equilibrium components, and
  /// |V - V0| / V0 for the volume.
  double constraint_tol = 1e-2;
  double volume_tol = 1e-3;
  /// Weak-form epochs solving for tau at the initial thickness before the
  /// outer loop starts.
  int warmup_epochs = 50;
  /// Keep psi at its initial state and optimise tau only.
  bool freeze_thickness = false;
  MuSchedule mu_schedule;
  LbfgsOptions lbfgs;

  void validate() const {
    if (!(V0 > 0.0)) throw ConfigError("V0", "target volume must be positive");
    if (!(t_min > 0.0)) throw ConfigError("t_min", "must be positive");
    if (!(t_max > t_min)) throw ConfigError("t_max", "must exceed t_min");
    if (!(mu_init > 0.0)) throw ConfigError("mu_init", "must be positive");
    if (outer_iters < 1) throw ConfigError("outer_iters", "must be at least 1");
    if (inner_epochs < 1) throw ConfigError("inner_epochs", "must be at least 1");
    if (!(constraint_tol > 0.0)) throw ConfigError("constraint_tol", "must be positive");
    if (!(volume_tol > 0.0)) throw ConfigError("volume_tol", "must be positive");
    if (warmup_epochs < 0) throw ConfigError("warmup_epochs", "must be non-negative");
    lbfgs.validate();
  }
};

struct OuterRecord {
  int iteration = 0;
  double compliance = 0.0;
  double volume = 0.0;
  double volume_residual = 0.0;  // V - V0
  double equilibrium_inf = 0.0;  // max |h| over equilibrium components
  double al_loss = 0.0;
  double mu = 0.0;               // penalty used during the inner solve
  bool feasible = false;
  int line_search_failures = 0;
};

/// One multiplier update as applied: lambda_new = lambda_old + 2 mu h.
struct MultiplierRecord {
  int iteration = 0;
  std::size_t index = 0;
  double lambda_old = 0.0;
  double mu = 0.0;
  double h = 0.0;
  double lambda_new = 0.0;
};

struct TopoptResult {
  Mlp tau;
  ThicknessField psi;
  ALState al;
  std::vector<OuterRecord> history;
  std::vector<MultiplierRecord> multipliers;
  bool converged = false;
  double wall_seconds = 0.0;
};

using OuterHook = std::function<void(const OuterRecord&)>;

/// Alternating augmented Lagrangian loop. Record 0 is the starting state; each
/// further outer iteration updates the multipliers from the previous inner
/// solve's residuals (lambda stays 0 for the first) and minimises the AL loss jointly over (tau, psi) for
/// `inner_epochs` L-BFGS epochs. Stops at the first iterate with
/// max |h| <= constraint_tol, the volume entry being scaled so that this
/// also means |V - V0| <= volume_tol V0.
inline TopoptResult topopt_run(TopoptEvaluator& ev, const TopoptConfig& cfg, Mlp tau, ThicknessField psi,
                               const OuterHook& hook = {}) {
  cfg.validate();
  ev.set_volume_scale(cfg.constraint_tol / cfg.volume_tol);
  if (psi.t_min() != cfg.t_min || psi.t_max() != cfg.t_max) {
    throw ConfigError("t_min", "thickness network bounds differ from the configuration");
  }
  const double A = ev.area();
  if (!(cfg.V0 > cfg.t_min * A && cfg.V0 < cfg.t_max * A)) {
    throw ConfigError("V0", "target volume " + std::to_string(cfg.V0) + " is infeasible: attainable volumes lie in (" +
                                std::to_string(cfg.t_min * A) + ", " + std::to_string(cfg.t_max * A) + ")");
  }
  const auto t0 = std::chrono::steady_clock::now();
  TopoptResult res;
  const std::size_t P = tau.size(), Q = psi.net().size();

  if (cfg.warmup_epochs > 0) {
    Lbfgs warm(cfg.lbfgs);
    Mlp work = tau;
    std::vector<double> x(tau.parameters().begin(), tau.parameters().end());
    const Objective pot = [&](std::span<const double> p, std::span<double> g) {
      work.set_parameters(p);
      return ev.potential(work, psi, g);
    };
    for (int e = 0; e < cfg.warmup_epochs; ++e) warm.step(x, pot);
    tau.set_parameters(x);
  }

  ALState st(ev.constraint_count(), cfg.mu_init);
  const std::size_t n_eq = ev.equilibrium_count();
  std::vector<std::size_t> tracked{n_eq};
  if (n_eq > 0) tracked = {0, n_eq / 2, n_eq - 1, n_eq};
  const std::size_t Qx = cfg.freeze_thickness ? 0 : Q;
  std::vector<double> x(P + Qx);
  std::copy(tau.parameters().begin(), tau.parameters().end(), x.begin());
  if (Qx > 0) std::copy(psi.net().parameters().begin(), psi.net().parameters().end(), x.begin() + static_cast<std::ptrdiff_t>(P));
  Mlp wt = tau;
  ThicknessField wp = psi;
  std::vector<double> g_psi(Q);
  auto load = [&](std::span<const double> p) {
    wt.set_parameters(p.subspan(0, P));
    if (Qx > 0) wp.net().set_parameters(p.subspan(P, Qx));
  };
  const Objective al = [&](std::span<const double> p, std::span<double> g) {
    load(p);
    std::span<double> gp = Qx > 0 ? g.subspan(P, Qx) : std::span<double>(g_psi);
    return ev.al_loss(wt, wp, st, cfg.V0, g.subspan(0, P), gp).total;
  };
  auto record = [&](int k, int failures, std::vector<double>& h) {
    OuterRecord rec;
    rec.iteration = k;
    rec.mu = st.mu;
    rec.line_search_failures = failures;
    const ALTerms T = ev.al_loss(wt, wp, st, cfg.V0, {}, {}, &h);
    rec.compliance = T.compliance;
    rec.volume = T.volume;
    rec.volume_residual = T.volume - cfg.V0;
    rec.equilibrium_inf = inf_norm(std::span<const double>(h).first(n_eq));
    rec.al_loss = T.total;
    rec.feasible = inf_norm(h) <= cfg.constraint_tol;
    res.history.push_back(rec);
    if (hook) hook(rec);
    return rec.feasible;
  };
  Lbfgs opt(cfg.lbfgs);
  std::vector<double> h(ev.constraint_count());
  res.converged = record(0, 0, h);
  for (int k = 1; k <= cfg.outer_iters && !res.converged; ++k) {
    if (k > 1) {
      st.h = h;
      std::vector<double> before(tracked.size());
      for (std::size_t i = 0; i < tracked.size(); ++i) before[i] = st.lambda[tracked[i]];
      const double mu = st.mu;
      multiplier_update(st, cfg.mu_schedule);
      for (std::size_t i = 0; i < tracked.size(); ++i) {
        res.multipliers.push_back({k, tracked[i], before[i], mu, st.h[tracked[i]], st.lambda[tracked[i]]});
      }
    }
    opt.reset();
    int failures = 0;
    for (int e = 0; e < cfg.inner_epochs; ++e)
      if (opt.step(x, al).failed) ++failures;
    load(x);
    res.converged = record(k, failures, h);
  }
  res.tau = wt;
  res.psi = wp;
  res.al = std::move(st);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace shellpinn
