// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mtune/merge.hpp"
#include "mtune/mergetune.hpp"
#include "mtune/tasks.hpp"

namespace mtune {

// Everything one end-to-end run needs: benchmark generator, model shape,
// the three training stages, merge baselines, and probe settings.
// Per-stage seeds are derived from master_seed at run time.
struct ExperimentConfig {
  std::uint64_t master_seed = 1;

  std::vector<int> hidden_dims = {32};
  Activation activation = Activation::kRelu;

  TaskGenConfig task{.shift_scale = 2.5, .noise_sigma = 1.0};

  TrainConfig pretrain{.learning_rate = 0.2, .epochs = 200, .batch_size = 50,
                       .lr_schedule = LrSchedule::kConstant};
  TrainConfig finetune{.learning_rate = 3.0, .epochs = 500, .batch_size = 16,
                       .lr_schedule = LrSchedule::kConstant};
  MergeTuneConfig mergetune{.lambda = 8.0, .beta = 0.5, .n_alpha = 5, .tau = 0.3,
                            .optimizer = {.learning_rate = 0.05, .epochs = 150, .batch_size = 16,
                                          .lr_schedule = LrSchedule::kConstant}};

  std::vector<MergeConfig> merges = {
      {.method = MergeMethod::kLinear, .alpha = 0.5},
      {.method = MergeMethod::kTies, .density = 0.5},
      {.method = MergeMethod::kDare, .drop_p = 0.9},
  };

  int probe_points = 21;
  bool ensemble_with_zero_shot = true;
  double ensemble_alpha = 0.5;

  ModelSpec model_spec() const {
    return {task.dim, hidden_dims, task.num_classes, activation};
  }
};

// Flat dotted-key config text: one "key = value" per line, '#' comments.
// Unknown keys are ConfigErrors. Keys under "sweep." collect value lists
// for run_sweep and are returned separately.
struct ParsedConfig {
  ExperimentConfig experiment;
  std::map<std::string, std::vector<double>> sweep_grid;
};

ParsedConfig parse_config_text(const std::string& text);
ParsedConfig load_config_file(const std::filesystem::path& path);

// Canonical "key = value" rendering (sorted keys); hashing this string
// gives the config hash reported in RunReports.
std::string canonical_config_text(const ExperimentConfig& cfg);

}  // namespace mtune
