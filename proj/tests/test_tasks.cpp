// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "mtune/errors.hpp"
#include "mtune/tasks.hpp"

using namespace mtune;

namespace {

bool datasets_equal(const Dataset& a, const Dataset& b) {
  if (a.size() != b.size() || a.dim() != b.dim()) return false;
  const auto ai = a.raw_inputs();
  const auto bi = b.raw_inputs();
  for (std::size_t i = 0; i < ai.size(); ++i) {
    if (ai[i] != bi[i]) return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.label(i) != b.label(i)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("generate_task_pair is deterministic in its seed") {
  TaskGenConfig cfg;
  cfg.seed = 42;
  const auto a = generate_task_pair(cfg);
  const auto b = generate_task_pair(cfg);
  CHECK(datasets_equal(a.pretrain_set, b.pretrain_set));
  CHECK(datasets_equal(a.downstream_train, b.downstream_train));
  CHECK(datasets_equal(a.eval_base, b.eval_base));
  CHECK(datasets_equal(a.eval_novel, b.eval_novel));
  CHECK(a.base_classes == b.base_classes);
}

TEST_CASE("base/novel split partitions the classes") {
  TaskGenConfig cfg;
  cfg.seed = 3;
  cfg.num_classes = 10;
  cfg.base_fraction = 0.5;
  const auto pair = generate_task_pair(cfg);
  CHECK(pair.base_classes.size() == 5);
  CHECK(pair.novel_classes.size() == 5);
  std::set<int> all;
  all.insert(pair.base_classes.begin(), pair.base_classes.end());
  all.insert(pair.novel_classes.begin(), pair.novel_classes.end());
  CHECK(all.size() == 10);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 9);

  // downstream labels are base-only, n_shots per class
  std::set<int> seen;
  for (std::size_t i = 0; i < pair.downstream_train.size(); ++i) {
    const int y = pair.downstream_train.label(i);
    CHECK(pair.base_classes.count(y) == 1);
    seen.insert(y);
  }
  CHECK(seen == pair.base_classes);
  CHECK(pair.downstream_train.size() == 5 * static_cast<std::size_t>(cfg.n_shots));
}

TEST_CASE("zero shift keeps downstream clusters aligned with pretraining") {
  TaskGenConfig cfg;
  cfg.seed = 8;
  cfg.shift_scale = 0.0;
  cfg.noise_sigma = 1e-9;  // collapse clusters onto their means
  const auto pair = generate_task_pair(cfg);

  // with (near-)zero noise, every downstream input must sit on some
  // pretraining class mean of the same label
  for (std::size_t i = 0; i < pair.downstream_train.size(); ++i) {
    const auto x = pair.downstream_train.row(i);
    const int y = pair.downstream_train.label(i);
    double best = 1e30;
    for (std::size_t j = 0; j < pair.pretrain_set.size(); ++j) {
      if (pair.pretrain_set.label(j) != y) continue;
      const auto px = pair.pretrain_set.row(j);
      double d = 0.0;
      for (int k = 0; k < cfg.dim; ++k) d += (x[k] - px[k]) * (x[k] - px[k]);
      best = std::min(best, d);
    }
    CHECK(best < 1e-12);
  }
}

TEST_CASE("generator rejects out-of-domain parameters") {
  TaskGenConfig cfg;
  cfg.num_classes = 3;
  CHECK_THROWS_AS(generate_task_pair(cfg), DomainError);
  cfg = {};
  cfg.base_fraction = 1.0;
  CHECK_THROWS_AS(generate_task_pair(cfg), DomainError);
  cfg = {};
  cfg.noise_sigma = 0.0;
  CHECK_THROWS_AS(generate_task_pair(cfg), DomainError);
  cfg = {};
  cfg.shift_scale = -1.0;
  CHECK_THROWS_AS(generate_task_pair(cfg), DomainError);
}

TEST_CASE("no NaN inputs in generated datasets") {
  TaskGenConfig cfg;
  cfg.seed = 99;
  const auto pair = generate_task_pair(cfg);
  for (const Dataset* ds :
       {&pair.pretrain_set, &pair.downstream_train, &pair.eval_base, &pair.eval_novel}) {
    for (double v : ds->raw_inputs()) CHECK(std::isfinite(v));
  }
}

TEST_CASE("BatchSampler partitions each epoch exactly") {
  TaskGenConfig cfg;
  cfg.seed = 5;
  const auto pair = generate_task_pair(cfg);
  const Dataset& ds = pair.downstream_train;

  BatchSampler sampler(ds, 16, 123);
  const std::size_t n = ds.size();
  std::vector<int> label_count_ds(ds.num_classes(), 0);
  for (std::size_t i = 0; i < n; ++i) ++label_count_ds[static_cast<std::size_t>(ds.label(i))];

  std::vector<int> label_count_epoch(ds.num_classes(), 0);
  std::size_t seen = 0;
  for (std::size_t b = 0; b < sampler.batches_per_epoch(); ++b) {
    const Batch batch = sampler.next();
    for (int y : batch.labels) ++label_count_epoch[static_cast<std::size_t>(y)];
    seen += batch.size();
  }
  CHECK(seen == n);
  CHECK(label_count_epoch == label_count_ds);
}

TEST_CASE("BatchSampler with batch_size == dataset size yields a permutation") {
  TaskGenConfig cfg;
  cfg.seed = 5;
  const auto pair = generate_task_pair(cfg);
  const Dataset& ds = pair.downstream_train;
  BatchSampler sampler(ds, static_cast<int>(ds.size()), 7);
  CHECK(sampler.batches_per_epoch() == 1);
  CHECK(sampler.next().size() == ds.size());
}

TEST_CASE("two samplers with the same seed agree; oversized batches throw") {
  TaskGenConfig cfg;
  cfg.seed = 5;
  const auto pair = generate_task_pair(cfg);
  const Dataset& ds = pair.downstream_train;

  BatchSampler a(ds, 10, 55);
  BatchSampler b(ds, 10, 55);
  for (int i = 0; i < 5; ++i) {
    const Batch ba = a.next();
    const Batch bb = b.next();
    CHECK(ba.labels == bb.labels);
    CHECK(ba.inputs == bb.inputs);
  }
  CHECK_THROWS_AS(BatchSampler(ds, static_cast<int>(ds.size()) + 1, 0), DomainError);
}
