// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mtune {

// One named parameter tensor inside the flat vector.
struct Segment {
  std::string name;
  std::vector<std::int64_t> shape;

  std::int64_t elements() const;
  bool operator==(const Segment&) const = default;
};

// Ordered (name, shape) list; element counts sum to the flat length.
using Layout = std::vector<Segment>;
using LayoutPtr = std::shared_ptr<const Layout>;

std::int64_t layout_elements(const Layout& layout);

// Immutable flat vector of 64-bit weights with shape metadata. All
// arithmetic allocates fresh outputs; values are checked finite on
// construction so no public operation can yield NaN/Inf silently.
class ParamVector {
public:
  ParamVector() = default;
  ParamVector(LayoutPtr layout, std::vector<double> values);

  static ParamVector zeros(LayoutPtr layout);

  const Layout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const { return layout_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  bool layout_compatible(const ParamVector& other) const;

  // Throws CompatibilityError if layouts differ.
  void require_compatible(const ParamVector& other, const char* op) const;

private:
  LayoutPtr layout_;
  std::vector<double> values_;
};

// (1-alpha)*w1 + alpha*w2, exact at both endpoints. alpha must be in [0,1].
ParamVector interpolate(const ParamVector& w1, const ParamVector& w2, double alpha);

// w1 - w2 elementwise.
ParamVector sub(const ParamVector& w1, const ParamVector& w2);

// y + a*x elementwise.
ParamVector axpy(const ParamVector& y, double a, const ParamVector& x);

// c*w elementwise.
ParamVector scale(const ParamVector& w, double c);

// sum of squares.
double l2_norm_sq(const ParamVector& w);

double dot(const ParamVector& a, const ParamVector& b);

}  // namespace mtune
