// SPDX-License-Identifier: Apache-2.0
#include "mtune/trainer.hpp"

#include <cmath>
#include <numbers>

#include "mtune/errors.hpp"

namespace mtune {

std::string to_string(LrSchedule s) {
  return s == LrSchedule::kConstant ? "constant" : "cosine";
}

LrSchedule lr_schedule_from_string(const std::string& s) {
  if (s == "constant") return LrSchedule::kConstant;
  if (s == "cosine") return LrSchedule::kCosine;
  throw DomainError("unknown lr schedule: " + s);
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kPretrained: return "pretrained";
    case Provenance::kFinetuned: return "finetuned";
    case Provenance::kMergetuned: return "mergetuned";
    case Provenance::kMerged: return "merged";
  }
  throw DomainError("bad provenance enum");
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "pretrained") return Provenance::kPretrained;
  if (s == "finetuned") return Provenance::kFinetuned;
  if (s == "mergetuned") return Provenance::kMergetuned;
  if (s == "merged") return Provenance::kMerged;
  throw DomainError("unknown provenance: " + s);
}

double scheduled_lr(const TrainConfig& cfg, std::size_t step, std::size_t total_steps) {
  if (cfg.lr_schedule == LrSchedule::kConstant) return cfg.learning_rate;
  if (total_steps <= 1) return cfg.learning_rate;
  const double t = static_cast<double>(step) / static_cast<double>(total_steps - 1);
  return cfg.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

Checkpoint train(const ModelSpec& spec, const ParamVector& init, const Dataset& dataset,
                 const TrainConfig& config) {
  if (config.learning_rate <= 0.0) throw DomainError("train: learning_rate must be > 0");
  if (config.epochs < 1) throw DomainError("train: epochs must be >= 1");

  BatchSampler sampler(dataset, config.batch_size, config.seed);
  const std::size_t total_steps =
      static_cast<std::size_t>(config.epochs) * sampler.batches_per_epoch();

  ParamVector w = init;
  std::size_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t b = 0; b < sampler.batches_per_epoch(); ++b, ++step) {
      Batch batch = sampler.next();
      try {
        auto [loss, grad] = loss_and_grad(spec, w, batch);
        if (!std::isfinite(loss)) throw DomainError("loss non-finite");
        w = axpy(w, -scheduled_lr(config, step, total_steps), grad);
      } catch (const DomainError&) {  // loss, grad, or update overflowed
        throw TrainingDivergedError("train: diverged at step " + std::to_string(step));
      }
    }
  }
  Checkpoint ckpt;
  ckpt.spec = spec;
  ckpt.params = std::move(w);
  ckpt.train_config = config;
  ckpt.seed = config.seed;
  return ckpt;
}

}  // namespace mtune
