// SPDX-License-Identifier: Apache-2.0
#include "mtune/param_vector.hpp"

#include <cmath>
#include <numeric>

#include "mtune/errors.hpp"

namespace mtune {

std::int64_t Segment::elements() const {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::int64_t layout_elements(const Layout& layout) {
  std::int64_t n = 0;
  for (const auto& seg : layout) n += seg.elements();
  return n;
}

ParamVector::ParamVector(LayoutPtr layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (!layout_) throw DomainError("ParamVector: null layout");
  if (layout_elements(*layout_) != static_cast<std::int64_t>(values_.size())) {
    throw CompatibilityError("ParamVector: layout element count " +
                             std::to_string(layout_elements(*layout_)) +
                             " != value count " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("ParamVector: non-finite value");
  }
}

ParamVector ParamVector::zeros(LayoutPtr layout) {
  std::vector<double> v(static_cast<std::size_t>(layout_elements(*layout)), 0.0);
  return ParamVector(std::move(layout), std::move(v));
}

bool ParamVector::layout_compatible(const ParamVector& other) const {
  if (layout_ == other.layout_) return true;
  if (!layout_ || !other.layout_) return false;
  return *layout_ == *other.layout_;
}

void ParamVector::require_compatible(const ParamVector& other, const char* op) const {
  if (!layout_compatible(other)) {
    throw CompatibilityError(std::string(op) + ": layout mismatch");
  }
}

ParamVector interpolate(const ParamVector& w1, const ParamVector& w2, double alpha) {
  w1.require_compatible(w2, "interpolate");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("interpolate: alpha outside [0,1]");
  }
  std::vector<double> out(w1.size());
  const double a = alpha, b = 1.0 - alpha;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = b * w1[i] + a * w2[i];
  return ParamVector(w1.layout_ptr(), std::move(out));
}

ParamVector sub(const ParamVector& w1, const ParamVector& w2) {
  w1.require_compatible(w2, "sub");
  std::vector<double> out(w1.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = w1[i] - w2[i];
  return ParamVector(w1.layout_ptr(), std::move(out));
}

ParamVector axpy(const ParamVector& y, double a, const ParamVector& x) {
  y.require_compatible(x, "axpy");
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + a * x[i];
  return ParamVector(y.layout_ptr(), std::move(out));
}

ParamVector scale(const ParamVector& w, double c) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * w[i];
  return ParamVector(w.layout_ptr(), std::move(out));
}

double l2_norm_sq(const ParamVector& w) {
  double s = 0.0;
  for (double v : w.values()) s += v * v;
  return s;
}

double dot(const ParamVector& a, const ParamVector& b) {
  a.require_compatible(b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace mtune
