// SPDX-License-Identifier: Apache-2.0
#include "mtune/merge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mtune/errors.hpp"

namespace mtune {

std::string to_string(MergeMethod m) {
  switch (m) {
    case MergeMethod::kLinear: return "linear";
    case MergeMethod::kTies: return "ties";
    case MergeMethod::kDare: return "dare";
  }
  throw DomainError("bad merge method enum");
}

MergeMethod merge_method_from_string(const std::string& s) {
  if (s == "linear") return MergeMethod::kLinear;
  if (s == "ties") return MergeMethod::kTies;
  if (s == "dare") return MergeMethod::kDare;
  throw DomainError("unknown merge method: " + s);
}

ParamVector linear_merge(const ParamVector& w1, const ParamVector& w2, double alpha) {
  return interpolate(w1, w2, alpha);
}

ParamVector ties_merge(const ParamVector& base, const std::vector<ParamVector>& deltas,
                       double density) {
  if (deltas.empty()) throw DomainError("ties_merge: need at least one delta");
  if (!(density > 0.0 && density <= 1.0)) throw DomainError("ties_merge: density outside (0,1]");
  for (const auto& d : deltas) base.require_compatible(d, "ties_merge");

  const std::size_t n = base.size();

  // Trim: per delta, per segment, keep the top ceil(density * seg_len)
  // coordinates by absolute magnitude.
  std::vector<std::vector<double>> trimmed(deltas.size(), std::vector<double>(n, 0.0));
  for (std::size_t t = 0; t < deltas.size(); ++t) {
    const auto& d = deltas[t];
    std::size_t off = 0;
    for (const auto& seg : base.layout()) {
      const std::size_t len = static_cast<std::size_t>(seg.elements());
      const std::size_t keep =
          static_cast<std::size_t>(std::ceil(density * static_cast<double>(len)));
      std::vector<std::size_t> idx(len);
      std::iota(idx.begin(), idx.end(), off);
      std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                        [&](std::size_t a, std::size_t b) {
                          const double ma = std::abs(d[a]), mb = std::abs(d[b]);
                          if (ma != mb) return ma > mb;
                          return a < b;  // stable tie order
                        });
      for (std::size_t k = 0; k < keep; ++k) trimmed[t][idx[k]] = d[idx[k]];
      off += len;
    }
  }

  // Elect sign and average sign-matching survivors per coordinate.
  std::vector<double> merged(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const auto& tr : trimmed) sum += tr[i];
    double elected;
    if (sum > 0.0) {
      elected = 1.0;
    } else if (sum < 0.0) {
      elected = -1.0;
    } else {
      // Tie: sign of the largest-magnitude trimmed value; if both signs
      // attain the max magnitude (or nothing survived), +.
      double best_mag = 0.0;
      bool pos_best = false, neg_best = false;
      for (const auto& tr : trimmed) {
        const double mag = std::abs(tr[i]);
        if (mag > best_mag) {
          best_mag = mag;
          pos_best = tr[i] > 0.0;
          neg_best = tr[i] < 0.0;
        } else if (mag == best_mag && mag > 0.0) {
          pos_best = pos_best || tr[i] > 0.0;
          neg_best = neg_best || tr[i] < 0.0;
        }
      }
      elected = (neg_best && !pos_best) ? -1.0 : 1.0;
    }
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& tr : trimmed) {
      if (tr[i] != 0.0 && ((tr[i] > 0.0) == (elected > 0.0))) {
        acc += tr[i];
        ++count;
      }
    }
    merged[i] = count > 0 ? acc / static_cast<double>(count) : 0.0;
  }

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + merged[i];
  return ParamVector(base.layout_ptr(), std::move(out));
}

ParamVector dare_merge(const ParamVector& base, const ParamVector& delta, double drop_p,
                       std::uint64_t seed) {
  base.require_compatible(delta, "dare_merge");
  if (!(drop_p >= 0.0 && drop_p < 1.0)) {
    throw DomainError("dare_merge: drop_p must be in [0,1)");
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution drop(drop_p);
  const double rescale = 1.0 / (1.0 - drop_p);
  std::vector<double> out(base.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool dropped = drop_p > 0.0 && drop(rng);
    out[i] = dropped ? base[i] : base[i] + delta[i] * rescale;
  }
  return ParamVector(base.layout_ptr(), std::move(out));
}

}  // namespace mtune
