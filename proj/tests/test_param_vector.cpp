// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>

#include "doctest.h"
#include "mtune/errors.hpp"
#include "mtune/param_vector.hpp"

using namespace mtune;

namespace {

LayoutPtr flat_layout(std::int64_t n) {
  return std::make_shared<Layout>(Layout{{"w", {n}}});
}

ParamVector pv(std::vector<double> v) {
  return {flat_layout(static_cast<std::int64_t>(v.size())), std::move(v)};
}

}  // namespace

TEST_CASE("ParamVector construction validates layout and finiteness") {
  CHECK_THROWS_AS(ParamVector(flat_layout(3), {1.0, 2.0}), CompatibilityError);
  CHECK_THROWS_AS(ParamVector(flat_layout(1), {std::numeric_limits<double>::quiet_NaN()}),
                  DomainError);
  CHECK_THROWS_AS(ParamVector(flat_layout(1), {std::numeric_limits<double>::infinity()}),
                  DomainError);
  CHECK(ParamVector::zeros(flat_layout(4)).size() == 4);
}

TEST_CASE("interpolate endpoints are exact and the midpoint is arithmetic") {
  const auto w1 = pv({0.0, 2.0});
  const auto w2 = pv({4.0, 6.0});

  const auto at0 = interpolate(w1, w2, 0.0);
  const auto at1 = interpolate(w1, w2, 1.0);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(at0[i] == w1[i]);
    CHECK(at1[i] == w2[i]);
  }
  const auto mid = interpolate(w1, w2, 0.5);
  CHECK(mid[0] == 2.0);
  CHECK(mid[1] == 4.0);
}

TEST_CASE("interpolate rejects out-of-range alpha and layout mismatches") {
  const auto w1 = pv({1.0});
  CHECK_THROWS_AS(interpolate(w1, w1, -0.1), DomainError);
  CHECK_THROWS_AS(interpolate(w1, w1, 1.1), DomainError);

  ParamVector other(std::make_shared<Layout>(Layout{{"b", {1}}}), {2.0});
  CHECK_THROWS_AS(interpolate(w1, other, 0.5), CompatibilityError);
  CHECK_THROWS_AS(sub(w1, other), CompatibilityError);
  CHECK_THROWS_AS(axpy(w1, 1.0, other), CompatibilityError);
}

TEST_CASE("interpolate symmetry: (w1,w2,a) == (w2,w1,1-a)") {
  const auto w1 = pv({0.5, -1.25, 3.0});
  const auto w2 = pv({2.0, 0.75, -4.5});
  for (double a : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    const auto fwd = interpolate(w1, w2, a);
    const auto bwd = interpolate(w2, w1, 1.0 - a);
    for (std::size_t i = 0; i < fwd.size(); ++i) {
      CHECK(fwd[i] == doctest::Approx(bwd[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("sub arithmetic and linearity") {
  const auto a = pv({3.0, 1.0});
  const auto b = pv({1.0, 4.0});
  const auto d = sub(a, b);
  CHECK(d[0] == 2.0);
  CHECK(d[1] == -3.0);

  const auto zero = sub(a, a);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  // sub(interpolate(w1,w2,a), w1) == a * sub(w2,w1)
  for (double alpha : {0.25, 0.5, 0.75}) {
    const auto lhs = sub(interpolate(a, b, alpha), a);
    const auto rhs = scale(sub(b, a), alpha);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("axpy arithmetic and the interpolation identity") {
  const auto y = pv({1.0, 1.0});
  const auto x = pv({3.0, 4.0});
  const auto r = axpy(y, 2.0, x);
  CHECK(r[0] == 7.0);
  CHECK(r[1] == 9.0);

  const auto same = axpy(y, 0.0, x);
  CHECK(same[0] == y[0]);
  CHECK(same[1] == y[1]);

  const auto w1 = pv({0.1, -2.0});
  const auto w2 = pv({5.0, 3.5});
  for (double alpha : {0.0, 0.3, 1.0}) {
    const auto via_axpy = axpy(w1, alpha, sub(w2, w1));
    const auto via_interp = interpolate(w1, w2, alpha);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(via_axpy[i] == doctest::Approx(via_interp[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("l2_norm_sq basics and homogeneity") {
  CHECK(l2_norm_sq(ParamVector::zeros(flat_layout(5))) == 0.0);
  CHECK(l2_norm_sq(pv({3.0, 4.0})) == 25.0);

  const auto w = pv({1.5, -2.0, 0.25});
  const double c = -3.0;
  CHECK(l2_norm_sq(scale(w, c)) == doctest::Approx(c * c * l2_norm_sq(w)).epsilon(1e-14));
}

TEST_CASE("surrogate distance scales as alpha^2 along a segment") {
  const auto w1 = pv({0.4, -1.0, 2.0, 0.0});
  const auto w2 = pv({-0.6, 1.5, 0.5, 3.0});
  const double base = l2_norm_sq(sub(w2, w1));
  for (double a : {0.1, 0.35, 0.7, 0.95}) {
    const double d = l2_norm_sq(sub(interpolate(w1, w2, a), w1));
    CHECK(d == doctest::Approx(a * a * base).epsilon(1e-10));
  }
}

TEST_CASE("dot product") {
  CHECK(dot(pv({1.0, 2.0, 3.0}), pv({4.0, -5.0, 6.0})) == doctest::Approx(12.0));
}
