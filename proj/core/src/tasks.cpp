// SPDX-License-Identifier: Apache-2.0
#include "mtune/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mtune/errors.hpp"

namespace mtune {
namespace {

void check_config(const TaskGenConfig& cfg) {
  if (cfg.num_classes < 4) throw DomainError("generate_task_pair: num_classes must be >= 4");
  if (cfg.dim < 1) throw DomainError("generate_task_pair: dim must be >= 1");
  if (!(cfg.base_fraction > 0.0 && cfg.base_fraction < 1.0)) {
    throw DomainError("generate_task_pair: base_fraction must be in (0,1)");
  }
  if (cfg.n_shots < 1) throw DomainError("generate_task_pair: n_shots must be >= 1");
  if (cfg.shift_scale < 0.0) throw DomainError("generate_task_pair: shift_scale must be >= 0");
  if (!(cfg.noise_sigma > 0.0)) throw DomainError("generate_task_pair: noise_sigma must be > 0");
  if (cfg.pretrain_per_class < 1 || cfg.eval_per_class < 1) {
    throw DomainError("generate_task_pair: per-class counts must be >= 1");
  }
}

// Draw n examples per class from Gaussian clusters centred at means[c].
Dataset sample_clusters(std::mt19937_64& rng, const std::vector<std::vector<double>>& means,
                        const std::vector<int>& classes, int n_per_class, double sigma, int dim,
                        int num_classes) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> inputs;
  std::vector<int> labels;
  inputs.reserve(static_cast<std::size_t>(classes.size()) * n_per_class * dim);
  labels.reserve(static_cast<std::size_t>(classes.size()) * n_per_class);
  for (int c : classes) {
    for (int k = 0; k < n_per_class; ++k) {
      for (int d = 0; d < dim; ++d) {
        inputs.push_back(means[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)] +
                         sigma * gauss(rng));
      }
      labels.push_back(c);
    }
  }
  return Dataset(dim, num_classes, std::move(inputs), std::move(labels));
}

}  // namespace

TaskPair generate_task_pair(const TaskGenConfig& cfg) {
  check_config(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int C = cfg.num_classes;
  const int d = cfg.dim;

  // Cluster means for the pretraining distribution.
  std::vector<std::vector<double>> means(static_cast<std::size_t>(C));
  for (auto& m : means) {
    m.resize(static_cast<std::size_t>(d));
    for (auto& v : m) v = gauss(rng);
  }

  // Random shift of magnitude shift_scale applied to every cluster for the
  // downstream distribution.
  std::vector<double> shift(static_cast<std::size_t>(d), 0.0);
  {
    double norm_sq = 0.0;
    for (auto& v : shift) {
      v = gauss(rng);
      norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    const double f = (norm > 0.0 && cfg.shift_scale > 0.0) ? cfg.shift_scale / norm : 0.0;
    for (auto& v : shift) v *= f;
  }
  std::vector<std::vector<double>> shifted_means = means;
  for (auto& m : shifted_means) {
    for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i)] += shift[static_cast<std::size_t>(i)];
  }

  // Base/novel split via a seeded permutation of class indices.
  std::vector<int> perm(static_cast<std::size_t>(C));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const int n_base = static_cast<int>(std::ceil(cfg.base_fraction * C));
  std::vector<int> base(perm.begin(), perm.begin() + n_base);
  std::vector<int> novel(perm.begin() + n_base, perm.end());
  std::sort(base.begin(), base.end());
  std::sort(novel.begin(), novel.end());
  std::vector<int> all(static_cast<std::size_t>(C));
  std::iota(all.begin(), all.end(), 0);

  TaskPair pair;
  pair.base_classes.insert(base.begin(), base.end());
  pair.novel_classes.insert(novel.begin(), novel.end());
  pair.pretrain_set =
      sample_clusters(rng, means, all, cfg.pretrain_per_class, cfg.noise_sigma, d, C);
  pair.downstream_train =
      sample_clusters(rng, shifted_means, base, cfg.n_shots, cfg.noise_sigma, d, C);
  pair.eval_base =
      sample_clusters(rng, shifted_means, base, cfg.eval_per_class, cfg.noise_sigma, d, C);
  pair.eval_novel = sample_clusters(rng, means, novel, cfg.eval_per_class, cfg.noise_sigma, d, C);
  return pair;
}

BatchSampler::BatchSampler(const Dataset& dataset, int batch_size, std::uint64_t seed)
    : dataset_(&dataset), batch_size_(batch_size), rng_(seed) {
  if (batch_size_ < 1) throw DomainError("BatchSampler: batch_size must be >= 1");
  if (static_cast<std::size_t>(batch_size_) > dataset.size()) {
    throw DomainError("BatchSampler: batch_size exceeds dataset size");
  }
  order_.resize(dataset.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  reshuffle();
}

void BatchSampler::reshuffle() {
  std::shuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
}

std::size_t BatchSampler::batches_per_epoch() const {
  return (dataset_->size() + static_cast<std::size_t>(batch_size_) - 1) /
         static_cast<std::size_t>(batch_size_);
}

Batch BatchSampler::next() {
  if (cursor_ >= order_.size()) reshuffle();
  const std::size_t take = std::min(static_cast<std::size_t>(batch_size_),
                                    order_.size() - cursor_);
  Batch batch;
  batch.input_dim = dataset_->dim();
  batch.inputs.reserve(take * static_cast<std::size_t>(batch.input_dim));
  batch.labels.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t idx = order_[cursor_ + i];
    auto row = dataset_->row(idx);
    batch.inputs.insert(batch.inputs.end(), row.begin(), row.end());
    batch.labels.push_back(dataset_->label(idx));
  }
  cursor_ += take;
  return batch;
}

}  // namespace mtune
