// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mtune/dataset.hpp"
#include "mtune/param_vector.hpp"

namespace mtune {

enum class Activation { kTanh, kRelu };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

// Fully connected classifier: input_dim -> hidden_dims... -> num_classes,
// softmax cross-entropy loss. Empty hidden_dims gives a linear (convex) model.
struct ModelSpec {
  int input_dim = 0;
  std::vector<int> hidden_dims;
  int num_classes = 0;
  Activation activation = Activation::kTanh;

  bool operator==(const ModelSpec&) const = default;
};

struct Batch {
  std::vector<double> inputs;  // row-major, rows * input_dim
  std::vector<int> labels;
  int input_dim = 0;

  std::size_t size() const { return labels.size(); }
};

// Deterministic (name, shape) layout: "layerK.weight" [out,in], "layerK.bias" [out].
LayoutPtr layout_for(const ModelSpec& spec);

// Fan-in scaled zero-mean Gaussian weights, zero biases. Deterministic in (spec, seed).
ParamVector init_params(const ModelSpec& spec, std::uint64_t seed);

// Mean softmax cross-entropy over the batch plus its exact analytic gradient.
std::pair<double, ParamVector> loss_and_grad(const ModelSpec& spec, const ParamVector& w,
                                             const Batch& batch);

// Loss only (same forward pass, no backprop allocation).
double loss_only(const ModelSpec& spec, const ParamVector& w, const Batch& batch);

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
  std::size_t examples = 0;
};

// Evaluates on the dataset, optionally restricted to a class subset: only
// examples whose true label is in the subset are scored, and both softmax
// and argmax run over the subset's logits only.
EvalResult evaluate(const ModelSpec& spec, const ParamVector& w, const Dataset& dataset,
                    const std::optional<std::set<int>>& class_subset = std::nullopt);

}  // namespace mtune
