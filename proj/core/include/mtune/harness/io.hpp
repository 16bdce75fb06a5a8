// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mtune/landscape.hpp"
#include "mtune/trainer.hpp"

namespace mtune {

// Shortest decimal representation that parses back to the same double.
std::string format_double_roundtrip(double v);

// 6 significant digits, for human-facing report tables.
std::string format_double_table(double v);

// Checkpoint JSON: {format_version, spec, layout, seed, provenance,
// train_config?, values}. Round-trip is bitwise lossless.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Dataset JSON: {format_version, dim, num_classes, inputs (row-major), labels}.
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

// PathProbe CSV, header "alpha,loss,accuracy", full round-trip precision.
void write_probe_csv(const PathProbe& probe, const std::filesystem::path& path);

struct ReportRow {
  std::string method;
  double base_acc = 0.0;
  double novel_acc = 0.0;
  double hm = 0.0;
};

// Report CSV, header "method,base_acc,novel_acc,hm", 6 significant digits.
void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path);
std::vector<ReportRow> read_report_csv(const std::filesystem::path& path);

}  // namespace mtune
