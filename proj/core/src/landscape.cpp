// SPDX-License-Identifier: Apache-2.0
#include "mtune/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mtune/errors.hpp"

namespace mtune {

PathProbe probe_path(const ModelSpec& spec, const ParamVector& wa, const ParamVector& wb,
                     int n_points, const Dataset& dataset,
                     const std::optional<std::set<int>>& class_subset) {
  wa.require_compatible(wb, "probe_path");
  if (n_points < 2) throw DomainError("probe_path: n_points must be >= 2");
  PathProbe probe;
  probe.alphas.reserve(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    const double alpha = static_cast<double>(k) / static_cast<double>(n_points - 1);
    const ParamVector w = interpolate(wa, wb, alpha);
    const EvalResult r = evaluate(spec, w, dataset, class_subset);
    probe.alphas.push_back(alpha);
    probe.losses.push_back(r.loss);
    probe.accuracies.push_back(r.accuracy);
  }
  return probe;
}

double barrier(const PathProbe& probe) {
  if (probe.losses.size() < 2) throw DomainError("barrier: probe needs >= 2 points");
  // Interior peak relative to the worse endpoint; negative when the whole
  // interior stays below both endpoints. A 2-point probe has no interior
  // and reports the degenerate 0 via the front endpoint.
  double peak = -std::numeric_limits<double>::infinity();
  if (probe.losses.size() == 2) {
    peak = std::min(probe.losses.front(), probe.losses.back());
  } else {
    for (std::size_t i = 1; i + 1 < probe.losses.size(); ++i) {
      peak = std::max(peak, probe.losses[i]);
    }
  }
  return peak - std::max(probe.losses.front(), probe.losses.back());
}

double quadratic_loss(const QuadraticTask& task, const ParamVector& v) {
  if (!(task.mu > 0.0)) throw DomainError("quadratic_loss: mu must be > 0");
  return 0.5 * task.mu * l2_norm_sq(sub(v, task.center));
}

ParamVector quadratic_grad(const QuadraticTask& task, const ParamVector& v) {
  if (!(task.mu > 0.0)) throw DomainError("quadratic_grad: mu must be > 0");
  return scale(sub(v, task.center), task.mu);
}

double surrogate_exactness_check(const QuadraticTask& task, const ParamVector& w,
                                 const std::vector<double>& alphas) {
  const ParamVector diff = sub(w, task.center);
  const double dist_sq = l2_norm_sq(diff);
  double max_err = 0.0;
  for (double a : alphas) {
    const ParamVector v = axpy(task.center, a, diff);
    const double exact = quadratic_loss(task, v);
    const double surrogate = 0.5 * task.mu * a * a * dist_sq;
    max_err = std::max(max_err, std::abs(exact - surrogate));
  }
  return max_err;
}

std::vector<SurrogateGapRow> surrogate_gap_report(const ModelSpec& spec, const ParamVector& w1,
                                                  const ParamVector& w,
                                                  const Dataset& replay_dataset,
                                                  const std::vector<double>& alphas,
                                                  double lambda_eff) {
  w1.require_compatible(w, "surrogate_gap_report");
  const double surrogate = lambda_eff * l2_norm_sq(sub(w, w1));
  std::vector<SurrogateGapRow> rows;
  rows.reserve(alphas.size());
  for (double a : alphas) {
    const ParamVector v = axpy(w1, a, sub(w, w1));
    const EvalResult r = evaluate(spec, v, replay_dataset);
    rows.push_back({a, r.loss, surrogate, r.loss - surrogate});
  }
  return rows;
}

}  // namespace mtune
