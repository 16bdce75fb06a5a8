// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtune/param_vector.hpp"

namespace mtune {

enum class MergeMethod { kLinear, kTies, kDare };

std::string to_string(MergeMethod m);
MergeMethod merge_method_from_string(const std::string& s);

struct MergeConfig {
  MergeMethod method = MergeMethod::kLinear;
  double alpha = 0.5;     // linear / ensemble mixing weight
  double density = 0.5;   // TIES keep fraction, per segment
  double drop_p = 0.9;    // DARE drop probability
  std::uint64_t seed = 0; // DARE randomness
};

// (1-alpha)*w1 + alpha*w2; identical arithmetic to interpolate.
ParamVector linear_merge(const ParamVector& w1, const ParamVector& w2, double alpha);

// Trim / elect sign / disjoint mean. Trimming keeps the top
// ceil(density * n) coordinates by |value| within each named segment.
// Sign ties (sum exactly 0) resolve to the sign of the largest-magnitude
// trimmed value at the coordinate, then to +.
ParamVector ties_merge(const ParamVector& base, const std::vector<ParamVector>& deltas,
                       double density);

// Drop each delta coordinate with probability drop_p (seeded), rescale
// survivors by 1/(1-drop_p); preserves the delta in expectation.
ParamVector dare_merge(const ParamVector& base, const ParamVector& delta, double drop_p,
                       std::uint64_t seed);

}  // namespace mtune
