// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mtune/model.hpp"

namespace mtune {

// Per-alpha loss/accuracy records along an interpolation segment,
// endpoints included.
struct PathProbe {
  std::vector<double> alphas;
  std::vector<double> losses;
  std::vector<double> accuracies;
  std::string endpoint_a;
  std::string endpoint_b;
  std::string eval_spec;
};

// Isotropic quadratic bowl (mu/2)*||v - center||^2; the stand-in for a
// pretraining loss whose Hessian is mu*I at its optimum.
struct QuadraticTask {
  double mu = 1.0;
  ParamVector center;
};

// Evaluates loss/accuracy at n_points evenly spaced alphas in [0,1].
PathProbe probe_path(const ModelSpec& spec, const ParamVector& wa, const ParamVector& wb,
                     int n_points, const Dataset& dataset,
                     const std::optional<std::set<int>>& class_subset = std::nullopt);

// max interior-or-endpoint loss minus max endpoint loss; negative when the
// path dips below both endpoints.
double barrier(const PathProbe& probe);

double quadratic_loss(const QuadraticTask& task, const ParamVector& v);
ParamVector quadratic_grad(const QuadraticTask& task, const ParamVector& v);

// Compares exact quadratic loss at center + a*(w - center) against the
// closed-form surrogate (mu*a^2/2)*||w - center||^2 over the alpha list;
// returns the max absolute discrepancy (machine precision for quadratics).
double surrogate_exactness_check(const QuadraticTask& task, const ParamVector& w,
                                 const std::vector<double>& alphas);

struct SurrogateGapRow {
  double alpha = 0.0;
  double exact_loss = 0.0;      // interpolated pretraining loss via evaluate
  double surrogate_value = 0.0; // lambda_eff * ||w - w1||^2
  double gap = 0.0;
};

// Diagnostic for non-quadratic losses: what the replay-free surrogate
// sacrifices. replay_dataset is the pretraining set and is used here only.
std::vector<SurrogateGapRow> surrogate_gap_report(const ModelSpec& spec, const ParamVector& w1,
                                                  const ParamVector& w,
                                                  const Dataset& replay_dataset,
                                                  const std::vector<double>& alphas,
                                                  double lambda_eff);

}  // namespace mtune
