#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "shellpinn/errors.hpp"

namespace shellpinn {

/// f(x), writing the gradient into g.
using Objective = std::function<double(std::span<const double> x, std::span<double> g)>;

struct LbfgsOptions {
  double lr = 1.0;
  int max_iter = 20;  // iterations per step() call
  int max_eval = 0;   // 0: max_iter * 5 / 4
  double tolerance_grad = 1e-7;
  double tolerance_change = 1e-9;
  int history_size = 100;
  bool strong_wolfe = true;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_ls = 25;

  void validate() const {
    if (!(lr > 0.0)) throw ConfigError("lbfgs_lr", "must be positive");
    if (max_iter < 1) throw ConfigError("lbfgs_max_iter", "must be at least 1");
    if (history_size < 1) throw ConfigError("lbfgs_history", "must be at least 1");
    if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) throw ConfigError("lbfgs_wolfe", "need 0 < c1 < c2 < 1");
  }
};

struct StepResult {
  double loss_before = 0.0;
  double loss_after = 0.0;
  int iterations = 0;
  int evaluations = 0;
  /// A line search ran but the loss did not decrease; parameters were left unchanged.
  bool failed = false;
};

namespace detail {

/// Minimiser of the cubic interpolating (x1, f1, g1) and (x2, f2, g2), clamped to bounds.
inline double cubic_interpolate(double x1, double f1, double g1, double x2, double f2, double g2, double lo,
                                double hi) {
  const double d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2);
  const double d2_sq = d1 * d1 - g1 * g2;
  if (d2_sq >= 0.0) {
    const double d2 = std::sqrt(d2_sq);
    const double pos = x1 <= x2 ? x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2.0 * d2))
                                : x1 - (x1 - x2) * ((g1 + d2 - d1) / (g1 - g2 + 2.0 * d2));
    return std::min(std::max(pos, lo), hi);
  }
  return 0.5 * (lo + hi);
}

inline double cubic_interpolate(double x1, double f1, double g1, double x2, double f2, double g2) {
  return cubic_interpolate(x1, f1, g1, x2, f2, g2, std::min(x1, x2), std::max(x1, x2));
}

}  // namespace detail

/// Limited-memory BFGS with a strong-Wolfe line search (bracketing with cubic
/// interpolation, then zoom). One call to step() performs up to max_iter
/// iterations; curvature history persists across calls.
class Lbfgs {
 public:
  using Vec = Eigen::VectorXd;

  Lbfgs() = default;
  explicit Lbfgs(LbfgsOptions o) : opt_(o) {
    opt_.validate();
    if (opt_.max_eval <= 0) opt_.max_eval = opt_.max_iter * 5 / 4;
  }

  const LbfgsOptions& options() const { return opt_; }
  long total_iterations() const { return n_iter_; }
  long total_evaluations() const { return func_evals_; }
  std::size_t history() const { return old_dirs_.size(); }

  /// Forgets the curvature history; the next iteration is a scaled gradient step.
  void reset() {
    n_iter_ = 0;
    old_dirs_.clear();
    old_stps_.clear();
    ro_.clear();
  }

  StepResult step(std::vector<double>& x_std, const Objective& f) {
    const auto n = static_cast<Eigen::Index>(x_std.size());
    Eigen::Map<Vec> x(x_std.data(), n);
    const Vec x_start = x;
    Vec g(n);
    auto eval = [&](const Vec& at, Vec& grad) {
      grad.setZero();
      return f(std::span<const double>(at.data(), static_cast<std::size_t>(n)),
               std::span<double>(grad.data(), static_cast<std::size_t>(n)));
    };

    StepResult res;
    double loss = eval(x, g);
    res.loss_before = loss;
    int current_evals = 1;
    ++func_evals_;
    if (g.cwiseAbs().maxCoeff() <= opt_.tolerance_grad) {
      res.loss_after = loss;
      res.evaluations = current_evals;
      return res;
    }

    int n_iter = 0;
    bool searched = false;
    while (n_iter < opt_.max_iter) {
      ++n_iter;
      ++n_iter_;
      if (n_iter_ == 1) {
        d_ = -g;
        old_dirs_.clear();
        old_stps_.clear();
        ro_.clear();
        h_diag_ = 1.0;
      } else {
        const Vec y = g - prev_g_;
        const Vec s = d_ * t_;
        const double ys = y.dot(s);
        if (ys > 1e-10) {
          if (static_cast<int>(old_dirs_.size()) == opt_.history_size) {
            old_dirs_.pop_front();
            old_stps_.pop_front();
            ro_.pop_front();
          }
          old_dirs_.push_back(y);
          old_stps_.push_back(s);
          ro_.push_back(1.0 / ys);
          h_diag_ = ys / y.dot(y);
        }
        const std::size_t m = old_dirs_.size();
        std::vector<double> al(m);
        Vec q = -g;
        for (std::size_t i = m; i-- > 0;) {
          al[i] = old_stps_[i].dot(q) * ro_[i];
          q -= al[i] * old_dirs_[i];
        }
        d_ = q * h_diag_;
        for (std::size_t i = 0; i < m; ++i) {
          const double be = old_dirs_[i].dot(d_) * ro_[i];
          d_ += (al[i] - be) * old_stps_[i];
        }
      }
      prev_g_ = g;
      const double prev_loss = loss;
      t_ = n_iter_ == 1 ? std::min(1.0, 1.0 / g.cwiseAbs().sum()) * opt_.lr : opt_.lr;
      const double gtd = g.dot(d_);
      if (gtd > -opt_.tolerance_change) break;

      int ls_evals = 0;
      bool opt_cond = false;
      searched = true;
      if (opt_.strong_wolfe) {
        const Vec x_init = x;
        ls_evals = strong_wolfe(eval, x_init, loss, g, gtd);
        x = x_init + t_ * d_;
        opt_cond = g.cwiseAbs().maxCoeff() <= opt_.tolerance_grad;
      } else {
        x += t_ * d_;
        if (n_iter != opt_.max_iter) {
          loss = eval(x, g);
          ls_evals = 1;
          opt_cond = g.cwiseAbs().maxCoeff() <= opt_.tolerance_grad;
        }
      }
      current_evals += ls_evals;
      func_evals_ += ls_evals;

      if (n_iter == opt_.max_iter) break;
      if (current_evals >= opt_.max_eval) break;
      if (opt_cond) break;
      if ((d_ * t_).cwiseAbs().maxCoeff() <= opt_.tolerance_change) break;
      if (std::abs(loss - prev_loss) < opt_.tolerance_change) break;
    }
    res.iterations = n_iter;
    res.evaluations = current_evals;
    res.loss_after = loss;
    if (opt_.strong_wolfe && searched && !(loss < res.loss_before)) {
      x = x_start;
      res.loss_after = res.loss_before;
      res.failed = true;
      reset();
    }
    return res;
  }

 private:
  /// Moves t_ to a strong-Wolfe point along d_ from x; updates f and g there.
  template <class Eval>
  int strong_wolfe(Eval& eval, const Vec& x, double& f, Vec& g, double gtd) {
    const double d_norm = d_.cwiseAbs().maxCoeff();
    double t = t_;
    Vec g_new(g.size());
    double f_new = eval(x + t * d_, g_new);
    int evals = 1;
    double gtd_new = g_new.dot(d_);
    double t_prev = 0.0, f_prev = f, gtd_prev = gtd;
    Vec g_prev = g;
    bool done = false;
    int ls_iter = 0;
    std::array<double, 2> br{}, br_f{}, br_gtd{};
    std::array<Vec, 2> br_g;
    int nb = 0;
    while (ls_iter < opt_.max_ls) {
      if (f_new > f + opt_.c1 * t * gtd || (ls_iter > 1 && f_new >= f_prev)) {
        br = {t_prev, t};
        br_f = {f_prev, f_new};
        br_g = {g_prev, g_new};
        br_gtd = {gtd_prev, gtd_new};
        nb = 2;
        break;
      }
      if (std::abs(gtd_new) <= -opt_.c2 * gtd) {
        br[0] = t;
        br_f[0] = f_new;
        br_g[0] = g_new;
        nb = 1;
        done = true;
        break;
      }
      if (gtd_new >= 0.0) {
        br = {t_prev, t};
        br_f = {f_prev, f_new};
        br_g = {g_prev, g_new};
        br_gtd = {gtd_prev, gtd_new};
        nb = 2;
        break;
      }
      const double min_step = t + 0.01 * (t - t_prev);
      const double max_step = t * 10.0;
      const double tmp = t;
      t = detail::cubic_interpolate(t_prev, f_prev, gtd_prev, t, f_new, gtd_new, min_step, max_step);
      t_prev = tmp;
      f_prev = f_new;
      g_prev = g_new;
      gtd_prev = gtd_new;
      f_new = eval(x + t * d_, g_new);
      ++evals;
      gtd_new = g_new.dot(d_);
      ++ls_iter;
    }
    if (ls_iter == opt_.max_ls) {
      br = {0.0, t};
      br_f = {f, f_new};
      br_g = {g, g_new};
      br_gtd = {gtd, gtd_new};
      nb = 2;
    }

    bool insuf_progress = false;
    int low = 0, high = 1;
    if (nb == 2 && br_f[0] > br_f[1]) std::swap(low, high);
    while (!done && ls_iter < opt_.max_ls) {
      if (std::abs(br[1] - br[0]) * d_norm < opt_.tolerance_change) break;
      t = detail::cubic_interpolate(br[0], br_f[0], br_gtd[0], br[1], br_f[1], br_gtd[1]);
      const double bmax = std::max(br[0], br[1]), bmin = std::min(br[0], br[1]);
      const double eps = 0.1 * (bmax - bmin);
      if (std::min(bmax - t, t - bmin) < eps) {
        if (insuf_progress || t >= bmax || t <= bmin) {
          t = std::abs(t - bmax) < std::abs(t - bmin) ? bmax - eps : bmin + eps;
          insuf_progress = false;
        } else {
          insuf_progress = true;
        }
      } else {
        insuf_progress = false;
      }
      f_new = eval(x + t * d_, g_new);
      ++evals;
      gtd_new = g_new.dot(d_);
      ++ls_iter;
      if (f_new > f + opt_.c1 * t * gtd || f_new >= br_f[low]) {
        br[high] = t;
        br_f[high] = f_new;
        br_g[high] = g_new;
        br_gtd[high] = gtd_new;
        if (br_f[0] <= br_f[1]) {
          low = 0;
          high = 1;
        } else {
          low = 1;
          high = 0;
        }
      } else {
        if (std::abs(gtd_new) <= -opt_.c2 * gtd) {
          done = true;
        } else if (gtd_new * (br[high] - br[low]) >= 0.0) {
          br[high] = br[low];
          br_f[high] = br_f[low];
          br_g[high] = br_g[low];
          br_gtd[high] = br_gtd[low];
        }
        br[low] = t;
        br_f[low] = f_new;
        br_g[low] = g_new;
        br_gtd[low] = gtd_new;
      }
    }
    if (nb == 1) low = 0;
    t_ = br[low];
    f = br_f[low];
    g = br_g[low];
    return evals;
  }

  LbfgsOptions opt_;
  long n_iter_ = 0;
  long func_evals_ = 0;
  Vec d_, prev_g_;
  double t_ = 0.0;
  double h_diag_ = 1.0;
  std::deque<Vec> old_dirs_, old_stps_;
  std::deque<double> ro_;
};

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const {
    if (!(lr > 0.0)) throw ConfigError("adam_lr", "must be positive");
  }
};

/// Adam with bias correction; one step per call.
class Adam {
 public:
  Adam() = default;
  explicit Adam(AdamOptions o) : opt_(o) { opt_.validate(); }

  StepResult step(std::vector<double>& x, const Objective& f) {
    const std::size_t n = x.size();
    if (m_.size() != n) {
      m_.assign(n, 0.0);
      v_.assign(n, 0.0);
    }
    std::vector<double> g(n, 0.0);
    StepResult r;
    r.loss_before = f(x, g);
    r.evaluations = 1;
    r.iterations = 1;
    ++k_;
    const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(k_));
    const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(k_));
    for (std::size_t i = 0; i < n; ++i) {
      m_[i] = opt_.beta1 * m_[i] + (1.0 - opt_.beta1) * g[i];
      v_[i] = opt_.beta2 * v_[i] + (1.0 - opt_.beta2) * g[i] * g[i];
      x[i] -= opt_.lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + opt_.eps);
    }
    std::vector<double> scratch(n, 0.0);
    r.loss_after = f(x, scratch);
    ++r.evaluations;
    return r;
  }

 private:
  AdamOptions opt_;
  long k_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace shellpinn
