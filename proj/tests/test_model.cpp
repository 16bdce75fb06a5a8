// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "doctest.h"
#include "mtune/errors.hpp"
#include "mtune/model.hpp"
#include "test_util.hpp"

using namespace mtune;
using namespace mtune::testutil;

TEST_CASE("init_params is deterministic with zero biases and the documented layout") {
  const ModelSpec spec{4, {6}, 3, Activation::kTanh};
  const auto a = init_params(spec, 7);
  const auto b = init_params(spec, 7);
  CHECK(bitwise_equal(a, b));

  const auto& layout = a.layout();
  REQUIRE(layout.size() == 4);
  CHECK(layout[0].name == "layer0.weight");
  CHECK(layout[0].shape == std::vector<std::int64_t>{6, 4});
  CHECK(layout[1].name == "layer0.bias");
  CHECK(layout[3].name == "layer1.bias");

  // bias segments start zeroed
  std::size_t off = 0;
  for (const auto& seg : layout) {
    if (seg.name.ends_with(".bias")) {
      for (std::int64_t i = 0; i < seg.elements(); ++i) CHECK(a[off + i] == 0.0);
    }
    off += static_cast<std::size_t>(seg.elements());
  }
}

TEST_CASE("linear spec parameter count") {
  const ModelSpec spec{4, {}, 3, Activation::kTanh};
  CHECK(layout_elements(*layout_for(spec)) == 4 * 3 + 3);
}

TEST_CASE("zero weights on a linear model give loss ln(C)") {
  const ModelSpec spec{5, {}, 4, Activation::kTanh};
  const auto w = ParamVector::zeros(layout_for(spec));
  const auto batch = random_batch(spec, 12, 3);
  auto [loss, grad] = loss_and_grad(spec, w, batch);
  CHECK(loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(grad.size() == w.size());
}

TEST_CASE("analytic gradient matches central finite differences") {
  const std::vector<ModelSpec> matrix = {
      {4, {}, 3, Activation::kTanh},
      {5, {6}, 4, Activation::kTanh},
      {5, {6}, 4, Activation::kRelu},
      {3, {5, 4}, 4, Activation::kTanh},
      {3, {5, 4}, 4, Activation::kRelu},
  };
  for (const auto& spec : matrix) {
    const auto batch = random_batch(spec, 8, 11);
    for (std::uint64_t pt = 0; pt < 10; ++pt) {
      const auto w = random_params(spec, 100 + pt, 0.7);
      auto [loss, grad] = loss_and_grad(spec, w, batch);
      const auto fd = fd_grad(w, [&](const ParamVector& v) {
        return loss_only(spec, v, batch);
      });
      CHECK(rel_error(grad, fd) < 1e-6);
      CHECK(loss == loss_only(spec, w, batch));
    }
  }
}

TEST_CASE("duplicating every example leaves loss and grad unchanged") {
  const ModelSpec spec{4, {5}, 4, Activation::kRelu};
  const auto w = random_params(spec, 21);
  const auto batch = random_batch(spec, 6, 5);

  Batch doubled = batch;
  doubled.inputs.insert(doubled.inputs.end(), batch.inputs.begin(), batch.inputs.end());
  doubled.labels.insert(doubled.labels.end(), batch.labels.begin(), batch.labels.end());

  auto [l1, g1] = loss_and_grad(spec, w, batch);
  auto [l2, g2] = loss_and_grad(spec, w, doubled);
  CHECK(l1 == doctest::Approx(l2).epsilon(1e-14));
  for (std::size_t i = 0; i < g1.size(); ++i) {
    CHECK(g1[i] == doctest::Approx(g2[i]).epsilon(1e-12));
  }
}

TEST_CASE("linear model loss is convex along segments") {
  const ModelSpec spec{6, {}, 4, Activation::kTanh};
  const auto batch = random_batch(spec, 16, 9);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto wa = random_params(spec, 300 + s);
    const auto wb = random_params(spec, 400 + s);
    const double la = loss_only(spec, wa, batch);
    const double lb = loss_only(spec, wb, batch);
    for (double a : {0.25, 0.5, 0.75}) {
      const double lm = loss_only(spec, interpolate(wa, wb, a), batch);
      CHECK(lm <= (1.0 - a) * la + a * lb + 1e-10);
    }
  }
}

TEST_CASE("loss stays finite under extreme logits") {
  const ModelSpec spec{3, {}, 4, Activation::kTanh};
  const auto w = random_params(spec, 1, 200.0);  // enormous weights
  const auto batch = random_batch(spec, 5, 2);
  CHECK(std::isfinite(loss_only(spec, w, batch)));
}

TEST_CASE("evaluate restricts examples and logits to the class subset") {
  const ModelSpec spec{4, {}, 6, Activation::kTanh};
  const auto w = random_params(spec, 31);

  std::vector<double> inputs;
  std::vector<int> labels;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist;
  for (int i = 0; i < 60; ++i) {
    for (int d = 0; d < 4; ++d) inputs.push_back(dist(rng));
    labels.push_back(i % 6);
  }
  const Dataset ds(4, 6, inputs, labels);

  const auto all = evaluate(spec, w, ds);
  const auto all_subset = evaluate(spec, w, ds, std::set<int>{0, 1, 2, 3, 4, 5});
  CHECK(all.accuracy == all_subset.accuracy);
  CHECK(all.loss == all_subset.loss);
  CHECK(all.examples == 60);

  const auto half = evaluate(spec, w, ds, std::set<int>{0, 2, 4});
  CHECK(half.examples == 30);

  CHECK_THROWS_AS(evaluate(spec, w, ds, std::set<int>{}), DomainError);
}

TEST_CASE("oracle-separable dataset evaluates to accuracy 1") {
  // identity-like linear map: class c has its own input coordinate
  const ModelSpec spec{4, {}, 4, Activation::kTanh};
  std::vector<double> values(static_cast<std::size_t>(layout_elements(*layout_for(spec))), 0.0);
  for (int c = 0; c < 4; ++c) values[static_cast<std::size_t>(c * 4 + c)] = 10.0;
  const ParamVector w(layout_for(spec), values);

  std::vector<double> inputs;
  std::vector<int> labels;
  for (int c = 0; c < 4; ++c) {
    for (int rep = 0; rep < 3; ++rep) {
      for (int d = 0; d < 4; ++d) inputs.push_back(d == c ? 1.0 : 0.0);
      labels.push_back(c);
    }
  }
  const Dataset ds(4, 4, inputs, labels);
  CHECK(evaluate(spec, w, ds).accuracy == 1.0);
}

TEST_CASE("random weights score about 1/C on a balanced set") {
  const ModelSpec spec{8, {}, 5, Activation::kTanh};
  std::vector<double> inputs;
  std::vector<int> labels;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> dist;
  const int per_class = 200;
  for (int c = 0; c < 5; ++c) {
    for (int i = 0; i < per_class; ++i) {
      for (int d = 0; d < 8; ++d) inputs.push_back(dist(rng));
      labels.push_back(c);
    }
  }
  const Dataset ds(8, 5, inputs, labels);

  // Monte Carlo over weight draws: mean accuracy within 3 sigma of 1/C.
  const int trials = 30;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) sum += evaluate(spec, random_params(spec, 1000 + t), ds).accuracy;
  const double mean = sum / trials;
  const double p = 1.0 / 5.0;
  const double sigma = std::sqrt(p * (1 - p) / (trials * per_class * 5.0));
  CHECK(std::abs(mean - p) < 3.0 * sigma + 0.01);
}
