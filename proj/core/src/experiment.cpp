// SPDX-License-Identifier: Apache-2.0
#include "mtune/harness/experiment.hpp"

#include <fstream>

#include "mtune/errors.hpp"
#include "mtune/harness/metrics.hpp"
#include "mtune/landscape.hpp"
#include "mtune/merge.hpp"
#include "mtune/mergetune.hpp"

namespace mtune {
namespace {

ReportRow evaluate_method(const std::string& method, const ModelSpec& spec, const ParamVector& w,
                          const TaskPair& pair) {
  const EvalResult base = evaluate(spec, w, pair.eval_base, pair.base_classes);
  const EvalResult novel = evaluate(spec, w, pair.eval_novel, pair.novel_classes);
  return {method, base.accuracy, novel.accuracy, harmonic_mean(base.accuracy, novel.accuracy)};
}

std::string merge_row_name(const MergeConfig& mc) {
  switch (mc.method) {
    case MergeMethod::kLinear: return "linear@" + format_double_table(mc.alpha);
    case MergeMethod::kTies: return "ties@" + format_double_table(mc.density);
    case MergeMethod::kDare: return "dare@" + format_double_table(mc.drop_p);
  }
  throw DomainError("bad merge method enum");
}

void write_mergetune_log(const std::vector<EpochLog>& logs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write file: " + path.string());
  out << "epoch,task,surrogate,lmc,total\n";
  for (const auto& log : logs) {
    out << log.epoch << ',' << format_double_roundtrip(log.mean_breakdown.task) << ','
        << format_double_roundtrip(log.mean_breakdown.surrogate) << ','
        << format_double_roundtrip(log.mean_breakdown.lmc) << ','
        << format_double_roundtrip(log.mean_breakdown.total) << '\n';
  }
}

}  // namespace

const ReportRow& RunReport::row(const std::string& method) const {
  for (const auto& r : rows) {
    if (r.method == method) return r;
  }
  throw DomainError("RunReport: no row for method " + method);
}

std::string RunReport::to_canonical_string() const {
  std::string s = "config_hash=" + std::to_string(config_hash) +
                  " master_seed=" + std::to_string(master_seed) +
                  " pretrain_reads_during_mergetune=" +
                  std::to_string(pretrain_reads_during_mergetune) + "\n";
  for (const auto& r : rows) {
    s += r.method + ',' + format_double_roundtrip(r.base_acc) + ',' +
         format_double_roundtrip(r.novel_acc) + ',' + format_double_roundtrip(r.hm) + '\n';
  }
  return s;
}

RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const bool persist = !out_dir.empty();
  if (persist) std::filesystem::create_directories(out_dir);

  ExperimentConfig cfg = config;  // local copy to pin derived seeds
  cfg.task.seed = hash64(cfg.master_seed, "task");
  cfg.pretrain.seed = hash64(cfg.master_seed, "pretrain");
  cfg.finetune.seed = hash64(cfg.master_seed, "finetune");
  cfg.mergetune.optimizer.seed = hash64(cfg.master_seed, "mergetune");

  const ModelSpec spec = cfg.model_spec();
  RunReport report;
  report.master_seed = cfg.master_seed;
  report.config_hash = hash64(0, canonical_config_text(cfg));

  std::string stage = "generate_task_pair";
  try {
    const TaskPair pair = generate_task_pair(cfg.task);

    stage = "pretrain";
    const ParamVector init = init_params(spec, hash64(cfg.master_seed, "init"));
    Checkpoint w1 = train(spec, init, pair.pretrain_set, cfg.pretrain);
    w1.provenance = Provenance::kPretrained;
    w1.lineage = "pretrained";

    stage = "finetune";
    Checkpoint w2 = train(spec, w1.params, pair.downstream_train, cfg.finetune);
    w2.provenance = Provenance::kFinetuned;
    w2.lineage = "finetuned";

    report.rows.push_back(evaluate_method("pretrained", spec, w1.params, pair));
    report.rows.push_back(evaluate_method("finetuned", spec, w2.params, pair));

    stage = "merge";
    const ParamVector delta = sub(w2.params, w1.params);
    for (const auto& mc : cfg.merges) {
      ParamVector merged = w1.params;
      switch (mc.method) {
        case MergeMethod::kLinear:
          merged = linear_merge(w1.params, w2.params, mc.alpha);
          break;
        case MergeMethod::kTies:
          merged = ties_merge(w1.params, {delta}, mc.density);
          break;
        case MergeMethod::kDare:
          merged = dare_merge(w1.params, delta, mc.drop_p, hash64(cfg.master_seed, "dare"));
          break;
      }
      report.rows.push_back(evaluate_method(merge_row_name(mc), spec, merged, pair));
      if (persist) {
        Checkpoint mckpt{spec, merged, Provenance::kMerged, merge_row_name(mc), std::nullopt,
                         cfg.master_seed};
        save_checkpoint(mckpt, out_dir / ("merged_" + to_string(mc.method) + ".json"));
      }
    }

    stage = "mergetune";
    const std::uint64_t pretrain_reads_before = pair.pretrain_set.reads();
    const MergeTuneResult mt = run_mergetune(spec, w1, w2, pair.downstream_train, cfg.mergetune);
    report.pretrain_reads_during_mergetune = pair.pretrain_set.reads() - pretrain_reads_before;
    report.rows.push_back(evaluate_method("mergetune", spec, mt.checkpoint.params, pair));

    if (cfg.ensemble_with_zero_shot) {
      const ParamVector ens =
          linear_merge(w1.params, mt.checkpoint.params, cfg.ensemble_alpha);
      report.rows.push_back(evaluate_method("ensemble", spec, ens, pair));
    }

    stage = "probe";
    struct ProbeSpec {
      const char* name;
      const ParamVector* a;
      const ParamVector* b;
    };
    const ProbeSpec probes[] = {
        {"probe_w1_w2", &w1.params, &w2.params},
        {"probe_ours_w1", &mt.checkpoint.params, &w1.params},
        {"probe_ours_w2", &mt.checkpoint.params, &w2.params},
    };
    for (const auto& p : probes) {
      // Task-2 loss along the segment: the same C-way cross-entropy on the
      // downstream training data that fine-tuning and MergeTune optimize.
      PathProbe probe = probe_path(spec, *p.a, *p.b, cfg.probe_points, pair.downstream_train);
      probe.eval_spec = "downstream_train";
      if (persist) {
        const auto path = out_dir / (std::string(p.name) + ".csv");
        write_probe_csv(probe, path);
        report.probe_files.push_back(path.string());
      }
    }

    stage = "persist";
    if (persist) {
      save_checkpoint(w1, out_dir / "pretrained.json");
      save_checkpoint(w2, out_dir / "finetuned.json");
      save_checkpoint(mt.checkpoint, out_dir / "mergetuned.json");
      save_dataset(pair.pretrain_set, out_dir / "pretrain_set.json");
      save_dataset(pair.downstream_train, out_dir / "downstream_train.json");
      save_dataset(pair.eval_base, out_dir / "eval_base.json");
      save_dataset(pair.eval_novel, out_dir / "eval_novel.json");
      const auto log_path = out_dir / "mergetune_log.csv";
      write_mergetune_log(mt.epoch_logs, log_path);
      report.mergetune_log_file = log_path.string();
      write_report_csv(report.rows, out_dir / "report.csv");
      std::ofstream cfg_out(out_dir / "config.resolved.cfg");
      cfg_out << canonical_config_text(cfg);
    }
  } catch (const std::exception& e) {
    if (persist) {
      std::ofstream fail(out_dir / "FAILED.txt");
      fail << "stage: " << stage << "\nerror: " << e.what() << '\n';
      if (!report.rows.empty()) write_report_csv(report.rows, out_dir / "report.partial.csv");
    }
    throw std::runtime_error("run_experiment failed at stage '" + stage + "': " + e.what());
  }
  return report;
}

void apply_sweep_param(ExperimentConfig& cfg, const std::string& key, double value) {
  if (key == "lambda") {
    cfg.mergetune.lambda = value;
  } else if (key == "beta") {
    cfg.mergetune.beta = value;
  } else if (key == "tau") {
    cfg.mergetune.tau = value;
  } else if (key == "n_alpha") {
    cfg.mergetune.n_alpha = static_cast<int>(value);
  } else if (key == "density" || key == "drop_p" || key == "alpha") {
    for (auto& mc : cfg.merges) {
      if (key == "density") mc.density = value;
      if (key == "drop_p") mc.drop_p = value;
      if (key == "alpha") mc.alpha = value;
    }
  } else {
    throw ConfigError("unknown sweep parameter: " + key);
  }
}

SweepReport run_sweep(const ExperimentConfig& base_config,
                      const std::map<std::string, std::vector<double>>& grid,
                      const std::filesystem::path& out_dir) {
  if (grid.empty()) throw ConfigError("run_sweep: empty grid");
  for (const auto& [key, values] : grid) {
    if (values.empty()) throw ConfigError("run_sweep: empty value list for " + key);
    ExperimentConfig probe = base_config;
    apply_sweep_param(probe, key, values.front());  // validates the key before any run
  }

  SweepReport report;
  for (const auto& [key, _] : grid) report.keys.push_back(key);  // std::map keeps keys sorted

  // Odometer over the cross product, last key fastest.
  std::vector<std::size_t> idx(report.keys.size(), 0);
  const bool persist = !out_dir.empty();
  if (persist) std::filesystem::create_directories(out_dir);
  while (true) {
    SweepCell cell;
    std::string cell_key;
    ExperimentConfig cfg = base_config;
    for (std::size_t k = 0; k < report.keys.size(); ++k) {
      const auto& values = grid.at(report.keys[k]);
      const double v = values[idx[k]];
      cell.coords[report.keys[k]] = v;
      apply_sweep_param(cfg, report.keys[k], v);
      if (k) cell_key += ',';
      cell_key += report.keys[k] + "=" + format_double_roundtrip(v);
    }
    cell.cell_seed = hash64(base_config.master_seed, cell_key);
    cfg.master_seed = cell.cell_seed;

    std::filesystem::path cell_dir;
    if (persist) {
      std::string dir_name = cell_key;
      for (char& c : dir_name) {
        if (c == ',' || c == '=') c = '_';
      }
      cell_dir = out_dir / dir_name;
    }
    const RunReport run = run_experiment(cfg, cell_dir);
    cell.mergetune_row = run.row("mergetune");
    report.cells.push_back(std::move(cell));

    // advance odometer
    std::size_t k = report.keys.size();
    while (k > 0) {
      --k;
      if (++idx[k] < grid.at(report.keys[k]).size()) break;
      idx[k] = 0;
      if (k == 0) {
        if (persist) write_sweep_csv(report, out_dir / "sweep.csv");
        return report;
      }
    }
  }
}

void write_sweep_csv(const SweepReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write file: " + path.string());
  for (const auto& key : report.keys) out << key << ',';
  out << "base_acc,novel_acc,hm\n";
  for (const auto& cell : report.cells) {
    for (const auto& key : report.keys) {
      out << format_double_roundtrip(cell.coords.at(key)) << ',';
    }
    out << format_double_table(cell.mergetune_row.base_acc) << ','
        << format_double_table(cell.mergetune_row.novel_acc) << ','
        << format_double_table(cell.mergetune_row.hm) << '\n';
  }
}

}  // namespace mtune
