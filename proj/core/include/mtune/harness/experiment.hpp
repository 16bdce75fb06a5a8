// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mtune/harness/config.hpp"
#include "mtune/harness/io.hpp"

namespace mtune {

// Outcome of one end-to-end run: per-method base/novel/HM rows plus the
// artifacts the run persisted. Accuracies are fractions in [0,1].
struct RunReport {
  std::vector<ReportRow> rows;
  std::uint64_t config_hash = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t pretrain_reads_during_mergetune = 0;
  std::vector<std::string> probe_files;
  std::string mergetune_log_file;

  const ReportRow& row(const std::string& method) const;
  std::string to_canonical_string() const;  // deterministic, timestamp-free
};

// Full pipeline: pretrain -> finetune -> merge baselines -> mergetune ->
// evaluate -> probe paths. When out_dir is non-empty, persists checkpoints,
// datasets, probe CSVs, the mergetune loss log, and report.csv there.
RunReport run_experiment(const ExperimentConfig& config,
                         const std::filesystem::path& out_dir = {});

struct SweepCell {
  std::map<std::string, double> coords;  // grid key -> value
  std::uint64_t cell_seed = 0;
  ReportRow mergetune_row;
};

struct SweepReport {
  std::vector<std::string> keys;  // sorted grid keys
  std::vector<SweepCell> cells;
};

// Cross-product sweep over grid values. Each cell derives its master seed
// as hash64(master_seed, canonical cell key) and is independently
// reproducible by running that cell's config standalone.
SweepReport run_sweep(const ExperimentConfig& base_config,
                      const std::map<std::string, std::vector<double>>& grid,
                      const std::filesystem::path& out_dir = {});

// Applies one sweep coordinate to a config (lambda, beta, tau, n_alpha,
// density, drop_p, alpha). Throws ConfigError for unknown keys.
void apply_sweep_param(ExperimentConfig& cfg, const std::string& key, double value);

void write_sweep_csv(const SweepReport& report, const std::filesystem::path& path);

}  // namespace mtune
