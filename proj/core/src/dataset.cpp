// SPDX-License-Identifier: Apache-2.0
#include "mtune/dataset.hpp"

#include <cmath>

#include "mtune/errors.hpp"

namespace mtune {

Dataset::Dataset(int dim, int num_classes, std::vector<double> inputs, std::vector<int> labels)
    : dim_(dim),
      num_classes_(num_classes),
      inputs_(std::move(inputs)),
      labels_(std::move(labels)),
      reads_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (dim_ <= 0) throw DomainError("Dataset: dim must be positive");
  if (num_classes_ < 1) throw DomainError("Dataset: num_classes must be >= 1");
  if (inputs_.size() != labels_.size() * static_cast<std::size_t>(dim_)) {
    throw DomainError("Dataset: inputs size inconsistent with labels and dim");
  }
  for (int y : labels_) {
    if (y < 0 || y >= num_classes_) throw DomainError("Dataset: label out of range");
  }
  for (double v : inputs_) {
    if (!std::isfinite(v)) throw DomainError("Dataset: non-finite input");
  }
}

}  // namespace mtune
