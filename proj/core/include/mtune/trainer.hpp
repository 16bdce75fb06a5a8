// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "mtune/model.hpp"
#include "mtune/tasks.hpp"

namespace mtune {

enum class LrSchedule { kConstant, kCosine };

std::string to_string(LrSchedule s);
LrSchedule lr_schedule_from_string(const std::string& s);

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 1;
  int batch_size = 32;
  std::uint64_t seed = 0;
  LrSchedule lr_schedule = LrSchedule::kConstant;
};

enum class Provenance { kPretrained, kFinetuned, kMergetuned, kMerged };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct Checkpoint {
  ModelSpec spec;
  ParamVector params;
  Provenance provenance = Provenance::kPretrained;
  std::string lineage;
  std::optional<TrainConfig> train_config;
  std::uint64_t seed = 0;
};

// Learning rate for step t of total_steps; cosine decays to exactly 0 at
// the final step.
double scheduled_lr(const TrainConfig& cfg, std::size_t step, std::size_t total_steps);

// Plain SGD: w <- w - lr_t * grad(L(w)). Deterministic; throws
// TrainingDivergedError naming the step if the loss leaves the finite range.
Checkpoint train(const ModelSpec& spec, const ParamVector& init, const Dataset& dataset,
                 const TrainConfig& config);

}  // namespace mtune
