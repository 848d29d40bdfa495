#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "shellpinn/errors.hpp"
#include "shellpinn/network/mlp.hpp"
#include "shellpinn/training/loss.hpp"
#include "shellpinn/training/optim.hpp"

namespace shellpinn {

enum class OptimizerKind { lbfgs, adam };

inline std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::lbfgs ? "lbfgs" : "adam"; }

inline OptimizerKind optimizer_from_string(std::string_view s) {
  if (s == "lbfgs") return OptimizerKind::lbfgs;
  if (s == "adam") return OptimizerKind::adam;
  throw ConfigError("optimizer", "expected 'lbfgs' or 'adam', got '" + std::string(s) + "'");
}

struct TrainConfig {
  int epochs = 100;
  OptimizerKind optimizer = OptimizerKind::lbfgs;
  LbfgsOptions lbfgs;
  AdamOptions adam;
  /// Abort when the loss rises above its initial value by this factor of |L0|.
  double divergence_factor = 1e3;
  /// The optimizer minimises loss_scale * loss. Histories record the unscaled
  /// loss. Only the optimizer's absolute tolerances and first step see it.
  double loss_scale = 1.0;

  void validate() const {
    if (epochs < 0) throw ConfigError("epochs", "must be non-negative");
    lbfgs.validate();
    adam.validate();
    if (!(divergence_factor > 0.0)) throw ConfigError("divergence_factor", "must be positive");
    if (!(loss_scale > 0.0) || !std::isfinite(loss_scale)) throw ConfigError("loss_scale", "must be positive");
  }
};

/// Network, optimizer internals and per-epoch histories. error_history is
/// either empty (no error tracked) or as long as loss_history.
struct TrainState {
  Mlp net;
  Lbfgs lbfgs;
  Adam adam;
  int epoch = 0;
  double initial_loss = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> loss_history;   // loss after each epoch
  std::vector<double> error_history;  // tracked error after each epoch
  int line_search_failures = 0;
  long evaluations = 0;
  double wall_seconds = 0.0;

  TrainState() = default;
  TrainState(Mlp n, const TrainConfig& cfg) : net(std::move(n)), lbfgs(cfg.lbfgs), adam(cfg.adam) {}
};

/// Called after every epoch with the updated state.
using EpochHook = std::function<void(const TrainState&)>;

/// Runs `cfg.epochs` full-batch epochs on `loss`. One epoch is one L-BFGS
/// step() call (up to max_iter iterations) or one Adam update.
inline void train(TrainState& st, const LossEvaluator& loss, const TrainConfig& cfg,
                  const std::function<double(const Mlp&)>& error = {}, const EpochHook& hook = {}) {
  cfg.validate();
  if (cfg.epochs == 0) return;
  Mlp work = st.net;
  const Objective objective = [&](std::span<const double> x, std::span<double> g) {
    work.set_parameters(x);
    const double v = loss(work, g);
    if (cfg.loss_scale != 1.0)
      for (double& gi : g) gi *= cfg.loss_scale;
    return cfg.loss_scale * v;
  };
  std::vector<double> x(st.net.parameters().begin(), st.net.parameters().end());
  for (int e = 0; e < cfg.epochs; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    const StepResult r =
        cfg.optimizer == OptimizerKind::lbfgs ? st.lbfgs.step(x, objective) : st.adam.step(x, objective);
    if (std::isnan(st.initial_loss)) st.initial_loss = r.loss_before / cfg.loss_scale;
    st.net.set_parameters(x);
    ++st.epoch;
    st.evaluations += r.evaluations;
    if (r.failed) ++st.line_search_failures;
    const double loss_after = r.loss_after / cfg.loss_scale;
    st.loss_history.push_back(loss_after);
    if (error) st.error_history.push_back(error(st.net));
    st.wall_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double L0 = st.initial_loss;
    if (!std::isfinite(loss_after) || (L0 != 0.0 && loss_after > L0 + cfg.divergence_factor * std::abs(L0))) {
      throw TrainingError("training diverged at epoch " + std::to_string(st.epoch) + ": loss " +
                          std::to_string(loss_after) + ", initial loss " + std::to_string(L0));
    }
    if (hook) hook(st);
  }
}

}  // namespace shellpinn
