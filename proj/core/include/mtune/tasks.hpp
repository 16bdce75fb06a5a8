// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "mtune/dataset.hpp"
#include "mtune/model.hpp"

namespace mtune {

// Synthetic two-task benchmark: a broad pretraining task over all classes
// and a narrow few-shot downstream task over the base split, with the
// downstream clusters translated by a random shift (distribution shift).
struct TaskPair {
  Dataset pretrain_set;      // all classes, pretraining distribution
  Dataset downstream_train;  // base classes only, n_shots per class, shifted
  Dataset eval_base;         // base classes, downstream (shifted) distribution
  Dataset eval_novel;        // novel classes, pretraining distribution
  std::set<int> base_classes;
  std::set<int> novel_classes;
};

struct TaskGenConfig {
  std::uint64_t seed = 0;
  int dim = 20;
  int num_classes = 10;
  double base_fraction = 0.5;
  int n_shots = 16;
  double shift_scale = 1.0;
  double noise_sigma = 0.5;
  int pretrain_per_class = 100;
  int eval_per_class = 200;
};

// Class-conditional Gaussian clusters; deterministic in the seed. Base
// classes are the first ceil(base_fraction * C) indices of a seeded
// permutation of [0, C).
TaskPair generate_task_pair(const TaskGenConfig& cfg);

// Without-replacement minibatch iterator: each epoch is a fresh seeded
// permutation of the dataset, partitioned into consecutive batches (the
// last batch of an epoch may be short).
class BatchSampler {
public:
  BatchSampler(const Dataset& dataset, int batch_size, std::uint64_t seed);

  Batch next();
  int batch_size() const { return batch_size_; }
  std::size_t batches_per_epoch() const;

private:
  const Dataset* dataset_;
  int batch_size_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;

  void reshuffle();
};

}  // namespace mtune
