// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace mtune {

// Immutable labelled point cloud. Labels are global class indices in
// [0, num_classes) even for datasets covering only a class subset.
//
// Every read of example data goes through row()/touch(), which bumps a
// counter shared by all copies; the experiment runner uses the counter
// to assert that the continued-fine-tuning stage never touches the
// pretraining set.
class Dataset {
public:
  Dataset() = default;
  Dataset(int dim, int num_classes, std::vector<double> inputs, std::vector<int> labels);

  int dim() const { return dim_; }
  int num_classes() const { return num_classes_; }
  std::size_t size() const { return labels_.size(); }

  std::span<const double> row(std::size_t i) const {
    touch();
    return {inputs_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  int label(std::size_t i) const { return labels_[i]; }

  // Raw access for serialization; counts as one read.
  std::span<const double> raw_inputs() const {
    touch();
    return inputs_;
  }
  std::span<const int> raw_labels() const { return labels_; }

  std::uint64_t reads() const { return reads_ ? reads_->load() : 0; }

private:
  void touch() const {
    if (reads_) reads_->fetch_add(1, std::memory_order_relaxed);
  }

  int dim_ = 0;
  int num_classes_ = 0;
  std::vector<double> inputs_;  // row-major, size() * dim_
  std::vector<int> labels_;
  std::shared_ptr<std::atomic<std::uint64_t>> reads_;
};

}  // namespace mtune
