// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "mtune/errors.hpp"
#include "mtune/merge.hpp"
#include "test_util.hpp"

using namespace mtune;
using namespace mtune::testutil;

namespace {

LayoutPtr flat_layout(std::int64_t n) {
  return std::make_shared<Layout>(Layout{{"w", {n}}});
}

ParamVector pv(std::vector<double> v) {
  return {flat_layout(static_cast<std::int64_t>(v.size())), std::move(v)};
}

}  // namespace

TEST_CASE("linear_merge matches interpolate bitwise") {
  const ModelSpec spec{5, {4}, 3, Activation::kTanh};
  const auto w1 = random_params(spec, 1);
  const auto w2 = random_params(spec, 2);
  for (double a : {0.0, 0.3, 0.5, 1.0}) {
    CHECK(bitwise_equal(linear_merge(w1, w2, a), interpolate(w1, w2, a)));
  }
  const auto mid = linear_merge(pv({2.0, 0.0}), pv({0.0, 2.0}), 0.5);
  CHECK(mid[0] == 1.0);
  CHECK(mid[1] == 1.0);
}

TEST_CASE("ties_merge single delta with density 1 is plain addition") {
  const auto base = pv({1.0, -2.0, 0.5});
  const auto delta = pv({0.25, 0.75, -1.5});
  const auto merged = ties_merge(base, {delta}, 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(merged[i] == doctest::Approx(base[i] + delta[i]).epsilon(1e-15));
  }
}

TEST_CASE("ties_merge hand-executed oracle") {
  // trim keeps [0.9, 0] and [0.8, 0]; coord 0 elects +, mean 0.85;
  // coord 1 fully trimmed -> 0
  const auto base = pv({0.0, 0.0});
  const auto d1 = pv({0.9, -0.1});
  const auto d2 = pv({0.8, 0.3});
  const auto merged = ties_merge(base, {d1, d2}, 0.5);
  CHECK(merged[0] == doctest::Approx(0.85).epsilon(1e-15));
  CHECK(merged[1] == 0.0);
}

TEST_CASE("ties_merge opposite deltas follow the documented tie rule") {
  // sums are exactly 0 at every coordinate; elected sign falls back to the
  // sign of the largest-magnitude trimmed value, then +; the cancelled mean
  // 0 must not appear
  const auto base = pv({0.0, 0.0, 0.0});
  const auto d = pv({1.0, -2.0, 0.5});
  const auto merged = ties_merge(base, {d, scale(d, -1.0)}, 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(merged[i]) == doctest::Approx(std::abs(d[i])).epsilon(1e-15));
  }
  // equal magnitudes in both directions -> final fallback is +
  CHECK(merged[0] > 0.0);
  CHECK(merged[2] > 0.0);
}

TEST_CASE("ties_merge same-sign deltas at density 1 reduce to the mean") {
  const ModelSpec spec{4, {3}, 3, Activation::kRelu};
  const auto base = random_params(spec, 10);
  auto d1 = random_params(spec, 11);
  // force shared signs coordinatewise
  std::vector<double> v2(d1.size());
  for (std::size_t i = 0; i < d1.size(); ++i) v2[i] = 2.5 * d1[i];
  const ParamVector d2(d1.layout_ptr(), v2);

  const auto merged = ties_merge(base, {d1, d2}, 1.0);
  for (std::size_t i = 0; i < merged.size(); ++i) {
    CHECK(merged[i] == doctest::Approx(base[i] + 0.5 * (d1[i] + d2[i])).epsilon(1e-12));
  }
}

TEST_CASE("ties trim count is per named segment") {
  // two segments; a globally applied trim would drop the entire small
  // segment because the big segment's magnitudes dominate
  auto layout = std::make_shared<Layout>(Layout{{"big", {4}}, {"small", {2}}});
  const ParamVector base(layout, std::vector<double>(6, 0.0));
  const ParamVector delta(layout, {10.0, 9.0, 8.0, 7.0, 0.2, 0.1});
  const auto merged = ties_merge(base, {delta}, 0.5);
  CHECK(merged[0] == 10.0);
  CHECK(merged[1] == 9.0);
  CHECK(merged[2] == 0.0);
  CHECK(merged[3] == 0.0);
  CHECK(merged[4] == doctest::Approx(0.2));  // kept within its own segment
  CHECK(merged[5] == 0.0);
}

TEST_CASE("ties_merge validates inputs") {
  const auto base = pv({0.0});
  CHECK_THROWS_AS(ties_merge(base, {}, 0.5), DomainError);
  CHECK_THROWS_AS(ties_merge(base, {base}, 0.0), DomainError);
  CHECK_THROWS_AS(ties_merge(base, {base}, 1.5), DomainError);
}

TEST_CASE("dare_merge identity at drop_p 0 and determinism") {
  const ModelSpec spec{4, {5}, 3, Activation::kTanh};
  const auto base = random_params(spec, 20);
  const auto delta = random_params(spec, 21);

  const auto ident = dare_merge(base, delta, 0.0, 7);
  for (std::size_t i = 0; i < ident.size(); ++i) {
    CHECK(ident[i] == base[i] + delta[i]);
  }
  CHECK(bitwise_equal(dare_merge(base, delta, 0.5, 7), dare_merge(base, delta, 0.5, 7)));
  CHECK_THROWS_AS(dare_merge(base, delta, 1.0, 0), DomainError);
}

TEST_CASE("dare_merge coordinates are base or base + delta/(1-p)") {
  const ModelSpec spec{6, {}, 4, Activation::kTanh};
  const auto base = random_params(spec, 30);
  const auto delta = random_params(spec, 31);
  const double p = 0.6;
  const auto merged = dare_merge(base, delta, p, 99);
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const bool dropped = merged[i] == base[i];
    const bool kept =
        std::abs(merged[i] - (base[i] + delta[i] / (1.0 - p))) < 1e-12 * (1 + std::abs(base[i]));
    CHECK((dropped || kept));
  }
}

TEST_CASE("dare_merge is unbiased over seeds (Monte Carlo)") {
  const auto base = pv({0.0, 0.0, 0.0});
  const auto delta = pv({1.0, -2.0, 0.5});
  const double p = 0.9;
  const int trials = 10000;

  std::vector<double> mean(3, 0.0);
  for (int s = 0; s < trials; ++s) {
    const auto out = dare_merge(base, delta, p, static_cast<std::uint64_t>(s));
    for (std::size_t i = 0; i < 3; ++i) mean[i] += out[i];
  }
  for (std::size_t i = 0; i < 3; ++i) {
    mean[i] /= trials;
    // per-coordinate variance of the rescaled Bernoulli estimator
    const double var = delta[i] * delta[i] * p / (1.0 - p);
    const double sigma = std::sqrt(var / trials);
    CHECK(std::abs(mean[i] - delta[i]) < 3.0 * sigma);
  }
}

TEST_CASE("merge method string round trips") {
  for (auto m : {MergeMethod::kLinear, MergeMethod::kTies, MergeMethod::kDare}) {
    CHECK(merge_method_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(merge_method_from_string("soup"), DomainError);
}
