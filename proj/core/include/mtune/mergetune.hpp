// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "mtune/trainer.hpp"

namespace mtune {

// Hyperparameters of the replay-free continued-fine-tuning objective
//   L(w) = L2(w) + lambda * ||w - w1||^2 + beta * mean_a L2(w2 + a(w - w2)).
struct MergeTuneConfig {
  double lambda = 8.0;
  double beta = 0.5;
  int n_alpha = 5;   // grid {1/n, ..., (n-1)/n}
  double tau = 0.3;  // init blend (1-tau)*w1 + tau*w2
  TrainConfig optimizer;
};

struct LossBreakdown {
  double task = 0.0;       // L2(w)
  double surrogate = 0.0;  // ||w - w1||^2
  double lmc = 0.0;        // grid mean of interpolated L2
  double total = 0.0;      // task + lambda*surrogate + beta*lmc
  bool empty_grid_warning = false;  // beta > 0 with an empty alpha grid
};

// Initialization blend (1-tau)*w1 + tau*w2.
ParamVector init_blend(const ParamVector& w1, const ParamVector& w2, double tau);

// Open interior grid {1/n, ..., (n-1)/n}; n = 1 gives an empty grid.
std::vector<double> alpha_grid(int n);

// Objective value (itemized) and exact analytic gradient
//   grad = dL2(w) + 2*lambda*(w - w1) + (beta/|A|) * sum_a a * dL2(w2 + a(w - w2))
// with the same minibatch feeding all terms.
std::pair<LossBreakdown, ParamVector> mergetune_loss_and_grad(
    const ModelSpec& spec, const ParamVector& w, const ParamVector& w1, const ParamVector& w2,
    const Batch& batch, const MergeTuneConfig& config);

struct EpochLog {
  int epoch = 0;
  LossBreakdown mean_breakdown;  // averaged over the epoch's minibatches
};

struct MergeTuneResult {
  Checkpoint checkpoint;
  std::vector<EpochLog> epoch_logs;
};

// SGD on the objective, initialized at the tau blend. The dataset must be
// the downstream training set only; pretraining data never enters.
// epoch_callback (optional) observes the parameters after each epoch.
MergeTuneResult run_mergetune(
    const ModelSpec& spec, const Checkpoint& w1, const Checkpoint& w2, const Dataset& dataset,
    const MergeTuneConfig& config,
    const std::function<void(int epoch, const ParamVector&)>& epoch_callback = {});

}  // namespace mtune
