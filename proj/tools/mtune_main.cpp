// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: trains, merges, tunes, probes and reports on the
// synthetic two-task benchmarks. Every subcommand prints a JSON summary on
// success so runs can be scripted.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtune/errors.hpp"
#include "mtune/harness/config.hpp"
#include "mtune/harness/experiment.hpp"
#include "mtune/harness/io.hpp"
#include "mtune/harness/metrics.hpp"
#include "mtune/landscape.hpp"
#include "mtune/merge.hpp"
#include "mtune/mergetune.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mtune;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

ParsedConfig load_config(const GlobalOpts& g) {
  ParsedConfig pc;
  if (!g.config_path.empty()) pc = load_config_file(g.config_path);
  if (g.seed) pc.experiment.master_seed = *g.seed;
  return pc;
}

std::optional<std::set<int>> parse_subset(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::set<int> subset;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) subset.insert(std::stoi(item));
  return subset;
}

json rows_to_json(const std::vector<ReportRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"method", r.method},
                   {"base_acc", r.base_acc},
                   {"novel_acc", r.novel_acc},
                   {"hm", r.hm}});
  }
  return arr;
}

void emit(const json& summary) { std::cout << summary.dump() << std::endl; }

TaskPair make_task_pair(const ExperimentConfig& cfg) {
  TaskGenConfig tc = cfg.task;
  tc.seed = hash64(cfg.master_seed, "task");
  return generate_task_pair(tc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale model merging and LMC-guided continued fine-tuning"};
  app.require_subcommand(1);
  app.fallthrough();  // accept global flags after the subcommand name

  GlobalOpts g;
  app.add_option("--config", g.config_path, "experiment config file")->envname("MTUNE_CONFIG");
  app.add_option("--out", g.out_dir, "output directory or file");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "master seed override");

  // run / sweep / pretrain take no extra options
  auto* cmd_run = app.add_subcommand("run", "full pipeline: pretrain, finetune, merge, mergetune");
  auto* cmd_sweep = app.add_subcommand("sweep", "cross-product hyperparameter sweep");
  auto* cmd_pretrain = app.add_subcommand("pretrain", "generate benchmark and train w1");

  std::string init_path, w1_path, w2_path, data_path, ckpt_path, subset_str, method_str = "linear";
  int n_points = 21;
  double alpha = 0.5, density = 0.5, drop_p = 0.9;

  auto* cmd_finetune = app.add_subcommand("finetune", "SGD fine-tuning from a checkpoint");
  cmd_finetune->add_option("--init", init_path, "initial checkpoint")->required();
  cmd_finetune->add_option("--data", data_path, "training dataset JSON")->required();

  auto* cmd_merge = app.add_subcommand("merge", "training-free merge of two checkpoints");
  cmd_merge->add_option("--method", method_str, "linear | ties | dare");
  cmd_merge->add_option("--w1", w1_path, "base checkpoint")->required();
  cmd_merge->add_option("--w2", w2_path, "other checkpoint")->required();
  cmd_merge->add_option("--alpha", alpha, "linear mixing weight");
  cmd_merge->add_option("--density", density, "TIES keep fraction");
  cmd_merge->add_option("--drop-p", drop_p, "DARE drop probability");

  auto* cmd_mergetune = app.add_subcommand("mergetune", "continued fine-tuning between w1 and w2");
  cmd_mergetune->add_option("--w1", w1_path, "zero-shot checkpoint")->required();
  cmd_mergetune->add_option("--w2", w2_path, "fine-tuned checkpoint")->required();
  cmd_mergetune->add_option("--data", data_path, "downstream training dataset JSON")->required();

  auto* cmd_probe = app.add_subcommand("probe", "loss/accuracy along an interpolation path");
  cmd_probe->add_option("--w1", w1_path, "endpoint A checkpoint")->required();
  cmd_probe->add_option("--w2", w2_path, "endpoint B checkpoint")->required();
  cmd_probe->add_option("--data", data_path, "evaluation dataset JSON")->required();
  cmd_probe->add_option("--n-points", n_points, "number of evenly spaced alphas");
  cmd_probe->add_option("--subset", subset_str, "comma-separated class subset");

  auto* cmd_eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  cmd_eval->add_option("--ckpt", ckpt_path, "checkpoint")->required();
  cmd_eval->add_option("--data", data_path, "evaluation dataset JSON")->required();
  cmd_eval->add_option("--subset", subset_str, "comma-separated class subset");

  auto* cmd_report = app.add_subcommand("report", "aggregate report.csv files under --out");

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (cmd_run->parsed()) {
      const ParsedConfig pc = load_config(g);
      const RunReport report = run_experiment(pc.experiment, g.out_dir);
      emit({{"command", "run"},
            {"out", g.out_dir},
            {"config_hash", report.config_hash},
            {"master_seed", report.master_seed},
            {"pretrain_reads_during_mergetune", report.pretrain_reads_during_mergetune},
            {"rows", rows_to_json(report.rows)}});
    } else if (cmd_sweep->parsed()) {
      const ParsedConfig pc = load_config(g);
      if (pc.sweep_grid.empty()) {
        throw ConfigError("sweep: config declares no sweep.* keys");
      }
      const SweepReport report = run_sweep(pc.experiment, pc.sweep_grid, g.out_dir);
      json cells = json::array();
      for (const auto& c : report.cells) {
        cells.push_back({{"coords", c.coords},
                         {"cell_seed", c.cell_seed},
                         {"base_acc", c.mergetune_row.base_acc},
                         {"novel_acc", c.mergetune_row.novel_acc},
                         {"hm", c.mergetune_row.hm}});
      }
      emit({{"command", "sweep"}, {"out", g.out_dir}, {"cells", cells}});
    } else if (cmd_pretrain->parsed()) {
      const ParsedConfig pc = load_config(g);
      const ExperimentConfig& cfg = pc.experiment;
      const ModelSpec spec = cfg.model_spec();
      const TaskPair pair = make_task_pair(cfg);
      TrainConfig tc = cfg.pretrain;
      tc.seed = hash64(cfg.master_seed, "pretrain");
      Checkpoint w1 = train(spec, init_params(spec, hash64(cfg.master_seed, "init")),
                            pair.pretrain_set, tc);
      w1.provenance = Provenance::kPretrained;
      w1.lineage = "pretrained";
      fs::create_directories(g.out_dir);
      const fs::path dir(g.out_dir);
      save_checkpoint(w1, dir / "pretrained.json");
      save_dataset(pair.pretrain_set, dir / "pretrain_set.json");
      save_dataset(pair.downstream_train, dir / "downstream_train.json");
      save_dataset(pair.eval_base, dir / "eval_base.json");
      save_dataset(pair.eval_novel, dir / "eval_novel.json");
      emit({{"command", "pretrain"},
            {"checkpoint", (dir / "pretrained.json").string()},
            {"base_classes", std::vector<int>(pair.base_classes.begin(), pair.base_classes.end())},
            {"novel_classes",
             std::vector<int>(pair.novel_classes.begin(), pair.novel_classes.end())}});
    } else if (cmd_finetune->parsed()) {
      const ParsedConfig pc = load_config(g);
      Checkpoint init = load_checkpoint(init_path);
      const Dataset data = load_dataset(data_path);
      TrainConfig tc = pc.experiment.finetune;
      tc.seed = hash64(pc.experiment.master_seed, "finetune");
      Checkpoint out = train(init.spec, init.params, data, tc);
      out.provenance = Provenance::kFinetuned;
      out.lineage = "finetuned(" + init.lineage + ")";
      fs::create_directories(g.out_dir);
      const fs::path path = fs::path(g.out_dir) / "finetuned.json";
      save_checkpoint(out, path);
      emit({{"command", "finetune"}, {"checkpoint", path.string()}});
    } else if (cmd_merge->parsed()) {
      const ParsedConfig pc = load_config(g);
      const Checkpoint a = load_checkpoint(w1_path);
      const Checkpoint b = load_checkpoint(w2_path);
      const MergeMethod method = merge_method_from_string(method_str);
      ParamVector merged = a.params;
      switch (method) {
        case MergeMethod::kLinear:
          merged = linear_merge(a.params, b.params, alpha);
          break;
        case MergeMethod::kTies:
          merged = ties_merge(a.params, {sub(b.params, a.params)}, density);
          break;
        case MergeMethod::kDare:
          merged = dare_merge(a.params, sub(b.params, a.params), drop_p,
                              pc.experiment.master_seed);
          break;
      }
      Checkpoint out{a.spec, merged, Provenance::kMerged,
                     to_string(method) + "(" + a.lineage + "," + b.lineage + ")", std::nullopt,
                     pc.experiment.master_seed};
      fs::create_directories(g.out_dir);
      const fs::path path = fs::path(g.out_dir) / ("merged_" + to_string(method) + ".json");
      save_checkpoint(out, path);
      emit({{"command", "merge"}, {"method", to_string(method)}, {"checkpoint", path.string()}});
    } else if (cmd_mergetune->parsed()) {
      const ParsedConfig pc = load_config(g);
      const Checkpoint w1 = load_checkpoint(w1_path);
      const Checkpoint w2 = load_checkpoint(w2_path);
      const Dataset data = load_dataset(data_path);
      MergeTuneConfig mc = pc.experiment.mergetune;
      mc.optimizer.seed = hash64(pc.experiment.master_seed, "mergetune");
      const MergeTuneResult result = run_mergetune(w1.spec, w1, w2, data, mc);
      fs::create_directories(g.out_dir);
      const fs::path dir(g.out_dir);
      save_checkpoint(result.checkpoint, dir / "mergetuned.json");
      {
        std::ofstream log(dir / "mergetune_log.csv");
        log << "epoch,task,surrogate,lmc,total\n";
        for (const auto& e : result.epoch_logs) {
          log << e.epoch << ',' << format_double_roundtrip(e.mean_breakdown.task) << ','
              << format_double_roundtrip(e.mean_breakdown.surrogate) << ','
              << format_double_roundtrip(e.mean_breakdown.lmc) << ','
              << format_double_roundtrip(e.mean_breakdown.total) << '\n';
        }
      }
      const auto& final_bd = result.epoch_logs.back().mean_breakdown;
      emit({{"command", "mergetune"},
            {"checkpoint", (dir / "mergetuned.json").string()},
            {"log", (dir / "mergetune_log.csv").string()},
            {"final_epoch_loss",
             {{"task", final_bd.task},
              {"surrogate", final_bd.surrogate},
              {"lmc", final_bd.lmc},
              {"total", final_bd.total}}}});
    } else if (cmd_probe->parsed()) {
      const Checkpoint a = load_checkpoint(w1_path);
      const Checkpoint b = load_checkpoint(w2_path);
      const Dataset data = load_dataset(data_path);
      PathProbe probe =
          probe_path(a.spec, a.params, b.params, n_points, data, parse_subset(subset_str));
      probe.endpoint_a = a.lineage;
      probe.endpoint_b = b.lineage;
      fs::create_directories(g.out_dir);
      const fs::path path = fs::path(g.out_dir) / "probe.csv";
      write_probe_csv(probe, path);
      emit({{"command", "probe"},
            {"csv", path.string()},
            {"barrier", barrier(probe)},
            {"endpoints", {probe.endpoint_a, probe.endpoint_b}}});
    } else if (cmd_eval->parsed()) {
      const Checkpoint ckpt = load_checkpoint(ckpt_path);
      const Dataset data = load_dataset(data_path);
      const EvalResult r = evaluate(ckpt.spec, ckpt.params, data, parse_subset(subset_str));
      emit({{"command", "eval"},
            {"loss", r.loss},
            {"accuracy", r.accuracy},
            {"examples", r.examples}});
    } else if (cmd_report->parsed()) {
      std::vector<json> runs;
      for (const auto& entry : fs::recursive_directory_iterator(g.out_dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "report.csv") {
          runs.push_back({{"file", entry.path().string()},
                          {"rows", rows_to_json(read_report_csv(entry.path()))}});
        }
      }
      emit({{"command", "report"}, {"runs", runs}});
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
