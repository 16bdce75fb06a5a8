// SPDX-License-Identifier: Apache-2.0
#include "mtune/mergetune.hpp"

#include <cmath>
#include <tuple>

#include "mtune/errors.hpp"

namespace mtune {

ParamVector init_blend(const ParamVector& w1, const ParamVector& w2, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("init_blend: tau outside [0,1]");
  return interpolate(w1, w2, tau);
}

std::vector<double> alpha_grid(int n) {
  if (n < 1) throw DomainError("alpha_grid: n must be >= 1");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n - 1));
  for (int k = 1; k < n; ++k) {
    grid.push_back(static_cast<double>(k) / static_cast<double>(n));
  }
  return grid;
}

std::pair<LossBreakdown, ParamVector> mergetune_loss_and_grad(
    const ModelSpec& spec, const ParamVector& w, const ParamVector& w1, const ParamVector& w2,
    const Batch& batch, const MergeTuneConfig& config) {
  w.require_compatible(w1, "mergetune_loss_and_grad");
  w.require_compatible(w2, "mergetune_loss_and_grad");
  if (config.lambda < 0.0 || config.beta < 0.0) {
    throw DomainError("mergetune_loss_and_grad: lambda and beta must be >= 0");
  }

  LossBreakdown bd;
  auto [task_loss, grad] = loss_and_grad(spec, w, batch);
  bd.task = task_loss;

  const ParamVector diff1 = sub(w, w1);
  bd.surrogate = l2_norm_sq(diff1);
  if (config.lambda != 0.0) {
    grad = axpy(grad, 2.0 * config.lambda, diff1);
  }

  const auto grid = alpha_grid(config.n_alpha);
  if (config.beta != 0.0 && !grid.empty()) {
    const double inv_a = 1.0 / static_cast<double>(grid.size());
    double lmc_sum = 0.0;
    for (double a : grid) {
      // w2 + a*(w - w2), evaluated on the same minibatch as the task term
      const ParamVector w_interp = axpy(w2, a, sub(w, w2));
      auto [l, g] = loss_and_grad(spec, w_interp, batch);
      lmc_sum += l;
      grad = axpy(grad, config.beta * inv_a * a, g);  // chain rule factor a
    }
    bd.lmc = lmc_sum * inv_a;
  } else if (config.beta != 0.0 && grid.empty()) {
    bd.empty_grid_warning = true;
  }

  bd.total = bd.task + config.lambda * bd.surrogate + config.beta * bd.lmc;
  return {bd, std::move(grad)};
}

MergeTuneResult run_mergetune(
    const ModelSpec& spec, const Checkpoint& w1, const Checkpoint& w2, const Dataset& dataset,
    const MergeTuneConfig& config,
    const std::function<void(int epoch, const ParamVector&)>& epoch_callback) {
  if (!(w1.spec == spec) || !(w2.spec == spec)) {
    throw CompatibilityError("run_mergetune: checkpoint specs do not match");
  }
  const TrainConfig& opt = config.optimizer;
  if (config.lambda < 0.0 || config.beta < 0.0) {
    throw DomainError("run_mergetune: lambda and beta must be >= 0");
  }
  if (opt.learning_rate <= 0.0) throw DomainError("run_mergetune: learning_rate must be > 0");
  if (opt.epochs < 1) throw DomainError("run_mergetune: epochs must be >= 1");

  ParamVector w = init_blend(w1.params, w2.params, config.tau);
  BatchSampler sampler(dataset, opt.batch_size, opt.seed);
  const std::size_t per_epoch = sampler.batches_per_epoch();
  const std::size_t total_steps = static_cast<std::size_t>(opt.epochs) * per_epoch;

  MergeTuneResult result;
  std::size_t step = 0;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    LossBreakdown mean{};
    for (std::size_t b = 0; b < per_epoch; ++b, ++step) {
      Batch batch = sampler.next();
      LossBreakdown bd;
      try {
        ParamVector grad;
        std::tie(bd, grad) =
            mergetune_loss_and_grad(spec, w, w1.params, w2.params, batch, config);
        if (!std::isfinite(bd.total)) throw DomainError("loss non-finite");
        w = axpy(w, -scheduled_lr(opt, step, total_steps), grad);
      } catch (const DomainError&) {  // loss, grad, or update overflowed
        throw TrainingDivergedError("run_mergetune: diverged at step " + std::to_string(step));
      }
      mean.task += bd.task;
      mean.surrogate += bd.surrogate;
      mean.lmc += bd.lmc;
      mean.total += bd.total;
      mean.empty_grid_warning = mean.empty_grid_warning || bd.empty_grid_warning;
    }
    const double inv = 1.0 / static_cast<double>(per_epoch);
    mean.task *= inv;
    mean.surrogate *= inv;
    mean.lmc *= inv;
    mean.total *= inv;
    result.epoch_logs.push_back({epoch, mean});
    if (epoch_callback) epoch_callback(epoch, w);
  }

  Checkpoint out;
  out.spec = spec;
  out.params = std::move(w);
  out.provenance = Provenance::kMergetuned;
  out.lineage = "mergetune(" + w1.lineage + "," + w2.lineage + ")";
  out.train_config = opt;
  out.seed = opt.seed;
  result.checkpoint = std::move(out);
  return result;
}

}  // namespace mtune
