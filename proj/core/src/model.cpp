// SPDX-License-Identifier: Apache-2.0
#include "mtune/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mtune/errors.hpp"

namespace mtune {
namespace {

struct LayerView {
  // Offsets into the flat vector for one affine layer.
  std::size_t w_off;
  std::size_t b_off;
  int in;
  int out;
};

std::vector<LayerView> layer_views(const ModelSpec& spec) {
  std::vector<int> dims;
  dims.push_back(spec.input_dim);
  for (int h : spec.hidden_dims) dims.push_back(h);
  dims.push_back(spec.num_classes);

  std::vector<LayerView> views;
  std::size_t off = 0;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    LayerView v;
    v.in = dims[k];
    v.out = dims[k + 1];
    v.w_off = off;
    off += static_cast<std::size_t>(v.in) * v.out;
    v.b_off = off;
    off += static_cast<std::size_t>(v.out);
    views.push_back(v);
  }
  return views;
}

double activate(Activation a, double z) {
  return a == Activation::kTanh ? std::tanh(z) : (z > 0.0 ? z : 0.0);
}

// Derivative expressed through the activation output; ReLU subgradient at 0 is 0.
double activate_deriv(Activation a, double h, double z) {
  if (a == Activation::kTanh) return 1.0 - h * h;
  return z > 0.0 ? 1.0 : 0.0;
}

void check_spec(const ModelSpec& spec) {
  if (spec.input_dim <= 0) throw DomainError("ModelSpec: input_dim must be positive");
  if (spec.num_classes < 2) throw DomainError("ModelSpec: num_classes must be >= 2");
  for (int h : spec.hidden_dims) {
    if (h <= 0) throw DomainError("ModelSpec: hidden dims must be positive");
  }
}

void check_layout(const ModelSpec& spec, const ParamVector& w, const char* op) {
  auto expect = layout_for(spec);
  if (!(w.layout() == *expect)) {
    throw CompatibilityError(std::string(op) + ": params do not match model spec layout");
  }
}

// Forward pass caching pre- and post-activation values per layer.
struct ForwardCache {
  std::vector<std::vector<double>> pre;   // z per affine layer
  std::vector<std::vector<double>> post;  // h per layer, post[0] = input copy
};

void forward(const ModelSpec& spec, const std::vector<LayerView>& views,
             std::span<const double> w, std::span<const double> x, ForwardCache& cache) {
  cache.pre.assign(views.size(), {});
  cache.post.assign(views.size() + 1, {});
  cache.post[0].assign(x.begin(), x.end());
  for (std::size_t k = 0; k < views.size(); ++k) {
    const auto& v = views[k];
    const auto& in = cache.post[k];
    auto& z = cache.pre[k];
    z.assign(static_cast<std::size_t>(v.out), 0.0);
    for (int o = 0; o < v.out; ++o) {
      double s = w[v.b_off + o];
      const double* row = w.data() + v.w_off + static_cast<std::size_t>(o) * v.in;
      for (int i = 0; i < v.in; ++i) s += row[i] * in[i];
      z[o] = s;
    }
    auto& h = cache.post[k + 1];
    if (k + 1 == views.size()) {
      h = z;  // logits, no activation
    } else {
      h.resize(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) h[i] = activate(spec.activation, z[i]);
    }
  }
}

// Softmax probabilities with max-shift; returns log-sum-exp for the loss.
double softmax_inplace(std::vector<double>& logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return mx + std::log(sum);
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "relu"; }

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw DomainError("unknown activation: " + s);
}

LayoutPtr layout_for(const ModelSpec& spec) {
  check_spec(spec);
  auto layout = std::make_shared<Layout>();
  auto views = layer_views(spec);
  for (std::size_t k = 0; k < views.size(); ++k) {
    const auto& v = views[k];
    layout->push_back({"layer" + std::to_string(k) + ".weight",
                       {static_cast<std::int64_t>(v.out), static_cast<std::int64_t>(v.in)}});
    layout->push_back({"layer" + std::to_string(k) + ".bias", {static_cast<std::int64_t>(v.out)}});
  }
  return layout;
}

ParamVector init_params(const ModelSpec& spec, std::uint64_t seed) {
  auto layout = layout_for(spec);
  auto views = layer_views(spec);
  std::vector<double> values(static_cast<std::size_t>(layout_elements(*layout)), 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& v : views) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(v.in));
    for (std::size_t i = 0; i < static_cast<std::size_t>(v.in) * v.out; ++i) {
      values[v.w_off + i] = scale * gauss(rng);
    }
    // biases stay zero
  }
  return ParamVector(std::move(layout), std::move(values));
}

std::pair<double, ParamVector> loss_and_grad(const ModelSpec& spec, const ParamVector& w,
                                             const Batch& batch) {
  check_layout(spec, w, "loss_and_grad");
  if (batch.size() == 0) throw DomainError("loss_and_grad: empty batch");
  if (batch.input_dim != spec.input_dim) {
    throw CompatibilityError("loss_and_grad: batch input_dim does not match spec");
  }
  auto views = layer_views(spec);
  auto wv = w.values();
  std::vector<double> grad(w.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;

  ForwardCache cache;
  std::vector<double> delta, next_delta;
  for (std::size_t ex = 0; ex < batch.size(); ++ex) {
    std::span<const double> x(batch.inputs.data() + ex * static_cast<std::size_t>(spec.input_dim),
                              static_cast<std::size_t>(spec.input_dim));
    const int y = batch.labels[ex];
    if (y < 0 || y >= spec.num_classes) throw DomainError("loss_and_grad: label out of range");

    forward(spec, views, wv, x, cache);
    std::vector<double> probs = cache.post.back();
    const double logit_y = probs[static_cast<std::size_t>(y)];
    const double lse = softmax_inplace(probs);
    loss += (lse - logit_y) * inv_n;

    // dL/dlogits = (p - onehot)/N
    delta = probs;
    delta[static_cast<std::size_t>(y)] -= 1.0;
    for (double& d : delta) d *= inv_n;

    for (std::size_t k = views.size(); k-- > 0;) {
      const auto& v = views[k];
      const auto& in = cache.post[k];
      for (int o = 0; o < v.out; ++o) {
        const double d = delta[static_cast<std::size_t>(o)];
        grad[v.b_off + o] += d;
        double* grow = grad.data() + v.w_off + static_cast<std::size_t>(o) * v.in;
        for (int i = 0; i < v.in; ++i) grow[i] += d * in[i];
      }
      if (k == 0) break;
      next_delta.assign(static_cast<std::size_t>(v.in), 0.0);
      for (int o = 0; o < v.out; ++o) {
        const double d = delta[static_cast<std::size_t>(o)];
        const double* row = wv.data() + v.w_off + static_cast<std::size_t>(o) * v.in;
        for (int i = 0; i < v.in; ++i) next_delta[static_cast<std::size_t>(i)] += d * row[i];
      }
      // through the activation of layer k-1
      const auto& h = cache.post[k];
      const auto& z = cache.pre[k - 1];
      for (std::size_t i = 0; i < next_delta.size(); ++i) {
        next_delta[i] *= activate_deriv(spec.activation, h[i], z[i]);
      }
      delta = next_delta;
    }
  }
  return {loss, ParamVector(w.layout_ptr(), std::move(grad))};
}

double loss_only(const ModelSpec& spec, const ParamVector& w, const Batch& batch) {
  check_layout(spec, w, "loss_only");
  if (batch.size() == 0) throw DomainError("loss_only: empty batch");
  auto views = layer_views(spec);
  auto wv = w.values();
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  ForwardCache cache;
  for (std::size_t ex = 0; ex < batch.size(); ++ex) {
    std::span<const double> x(batch.inputs.data() + ex * static_cast<std::size_t>(spec.input_dim),
                              static_cast<std::size_t>(spec.input_dim));
    forward(spec, views, wv, x, cache);
    std::vector<double> probs = cache.post.back();
    const double logit_y = probs[static_cast<std::size_t>(batch.labels[ex])];
    const double lse = softmax_inplace(probs);
    loss += (lse - logit_y) * inv_n;
  }
  return loss;
}

EvalResult evaluate(const ModelSpec& spec, const ParamVector& w, const Dataset& dataset,
                    const std::optional<std::set<int>>& class_subset) {
  check_layout(spec, w, "evaluate");
  if (dataset.dim() != spec.input_dim) {
    throw CompatibilityError("evaluate: dataset dim does not match spec");
  }
  std::vector<int> subset;
  if (class_subset) {
    subset.assign(class_subset->begin(), class_subset->end());
    for (int c : subset) {
      if (c < 0 || c >= spec.num_classes) throw DomainError("evaluate: subset class out of range");
    }
    if (subset.empty()) throw DomainError("evaluate: empty class subset");
  } else {
    subset.resize(static_cast<std::size_t>(spec.num_classes));
    for (int c = 0; c < spec.num_classes; ++c) subset[static_cast<std::size_t>(c)] = c;
  }

  auto views = layer_views(spec);
  auto wv = w.values();
  ForwardCache cache;
  double loss = 0.0;
  std::size_t n = 0, correct = 0;
  for (std::size_t ex = 0; ex < dataset.size(); ++ex) {
    const int y = dataset.label(ex);
    auto it = std::lower_bound(subset.begin(), subset.end(), y);
    if (it == subset.end() || *it != y) continue;
    const std::size_t y_pos = static_cast<std::size_t>(it - subset.begin());

    forward(spec, views, wv, dataset.row(ex), cache);
    const auto& logits = cache.post.back();
    std::vector<double> restricted(subset.size());
    for (std::size_t j = 0; j < subset.size(); ++j) {
      restricted[j] = logits[static_cast<std::size_t>(subset[j])];
    }
    const std::size_t pred =
        static_cast<std::size_t>(std::max_element(restricted.begin(), restricted.end()) -
                                 restricted.begin());
    const double logit_y = restricted[y_pos];
    const double lse = softmax_inplace(restricted);
    loss += lse - logit_y;
    correct += (pred == y_pos) ? 1 : 0;
    ++n;
  }
  if (n == 0) throw DomainError("evaluate: no examples with labels in the class subset");
  return {loss / static_cast<double>(n), static_cast<double>(correct) / static_cast<double>(n), n};
}

}  // namespace mtune
