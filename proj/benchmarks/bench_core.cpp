// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "mtune/merge.hpp"
#include "mtune/mergetune.hpp"
#include "mtune/model.hpp"
#include "mtune/tasks.hpp"

using namespace mtune;

namespace {

struct BenchData {
  ModelSpec spec{20, {32}, 10, Activation::kRelu};
  ParamVector w, w1, w2;
  Batch batch;

  BenchData() {
    w = init_params(spec, 1);
    w1 = init_params(spec, 2);
    w2 = init_params(spec, 3);
    TaskGenConfig tcfg;
    tcfg.seed = 4;
    const auto pair = generate_task_pair(tcfg);
    BatchSampler sampler(pair.downstream_train, 16, 5);
    batch = sampler.next();
  }
};

const BenchData& data() {
  static const BenchData d;
  return d;
}

void BM_loss_and_grad(benchmark::State& state) {
  const auto& d = data();
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_grad(d.spec, d.w, d.batch));
  }
}
BENCHMARK(BM_loss_and_grad);

void BM_mergetune_step_objective(benchmark::State& state) {
  const auto& d = data();
  const MergeTuneConfig cfg;  // lambda 8, beta 0.5, n_alpha 5
  for (auto _ : state) {
    benchmark::DoNotOptimize(mergetune_loss_and_grad(d.spec, d.w, d.w1, d.w2, d.batch, cfg));
  }
}
BENCHMARK(BM_mergetune_step_objective);

void BM_interpolate(benchmark::State& state) {
  const auto& d = data();
  for (auto _ : state) {
    benchmark::DoNotOptimize(interpolate(d.w1, d.w2, 0.5));
  }
}
BENCHMARK(BM_interpolate);

void BM_ties_merge(benchmark::State& state) {
  const auto& d = data();
  const ParamVector delta = sub(d.w2, d.w1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ties_merge(d.w1, {delta}, 0.5));
  }
}
BENCHMARK(BM_ties_merge);

void BM_dare_merge(benchmark::State& state) {
  const auto& d = data();
  const ParamVector delta = sub(d.w2, d.w1);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dare_merge(d.w1, delta, 0.9, seed++));
  }
}
BENCHMARK(BM_dare_merge);

}  // namespace

BENCHMARK_MAIN();
