// SPDX-License-Identifier: Apache-2.0
#include "mtune/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mtune/errors.hpp"
#include "mtune/harness/io.hpp"

namespace mtune {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse number '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse integer '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse integer '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': cannot parse bool '" + value + "'");
}

const std::vector<std::string> kSweepKeys = {"lambda", "beta",   "tau",  "n_alpha",
                                             "density", "drop_p", "alpha"};

void apply_train_key(TrainConfig& cfg, const std::string& key, const std::string& field,
                     const std::string& value) {
  if (field == "learning_rate") {
    cfg.learning_rate = parse_double(key, value);
  } else if (field == "epochs") {
    cfg.epochs = parse_int(key, value);
  } else if (field == "batch_size") {
    cfg.batch_size = parse_int(key, value);
  } else if (field == "lr_schedule") {
    try {
      cfg.lr_schedule = lr_schedule_from_string(value);
    } catch (const DomainError& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

void apply_key(ParsedConfig& pc, const std::string& key, const std::string& value) {
  ExperimentConfig& cfg = pc.experiment;
  const auto dot = key.find('.');
  const std::string head = dot == std::string::npos ? key : key.substr(0, dot);
  const std::string rest = dot == std::string::npos ? "" : key.substr(dot + 1);

  if (key == "master_seed") {
    cfg.master_seed = parse_u64(key, value);
  } else if (key == "model.hidden_dims") {
    cfg.hidden_dims.clear();
    for (const auto& item : split_list(value)) cfg.hidden_dims.push_back(parse_int(key, item));
  } else if (key == "model.activation") {
    try {
      cfg.activation = activation_from_string(value);
    } catch (const DomainError& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  } else if (key == "task.dim") {
    cfg.task.dim = parse_int(key, value);
  } else if (key == "task.num_classes") {
    cfg.task.num_classes = parse_int(key, value);
  } else if (key == "task.base_fraction") {
    cfg.task.base_fraction = parse_double(key, value);
  } else if (key == "task.n_shots") {
    cfg.task.n_shots = parse_int(key, value);
  } else if (key == "task.shift_scale") {
    cfg.task.shift_scale = parse_double(key, value);
  } else if (key == "task.noise_sigma") {
    cfg.task.noise_sigma = parse_double(key, value);
  } else if (key == "task.pretrain_per_class") {
    cfg.task.pretrain_per_class = parse_int(key, value);
  } else if (key == "task.eval_per_class") {
    cfg.task.eval_per_class = parse_int(key, value);
  } else if (head == "pretrain") {
    apply_train_key(cfg.pretrain, key, rest, value);
  } else if (head == "finetune") {
    apply_train_key(cfg.finetune, key, rest, value);
  } else if (key == "mergetune.lambda") {
    cfg.mergetune.lambda = parse_double(key, value);
  } else if (key == "mergetune.beta") {
    cfg.mergetune.beta = parse_double(key, value);
  } else if (key == "mergetune.n_alpha") {
    cfg.mergetune.n_alpha = parse_int(key, value);
  } else if (key == "mergetune.tau") {
    cfg.mergetune.tau = parse_double(key, value);
  } else if (head == "mergetune") {
    apply_train_key(cfg.mergetune.optimizer, key, rest, value);
  } else if (key == "merge.methods") {
    cfg.merges.clear();
    for (const auto& item : split_list(value)) {
      MergeConfig mc;
      try {
        mc.method = merge_method_from_string(item);
      } catch (const DomainError& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
      }
      cfg.merges.push_back(mc);
    }
  } else if (key == "merge.alpha" || key == "merge.density" || key == "merge.drop_p") {
    const double v = parse_double(key, value);
    for (auto& mc : cfg.merges) {
      if (rest == "alpha") mc.alpha = v;
      if (rest == "density") mc.density = v;
      if (rest == "drop_p") mc.drop_p = v;
    }
  } else if (key == "probe.n_points") {
    cfg.probe_points = parse_int(key, value);
  } else if (key == "ensemble.enabled") {
    cfg.ensemble_with_zero_shot = parse_bool(key, value);
  } else if (key == "ensemble.alpha") {
    cfg.ensemble_alpha = parse_double(key, value);
  } else if (head == "sweep") {
    if (std::find(kSweepKeys.begin(), kSweepKeys.end(), rest) == kSweepKeys.end()) {
      throw ConfigError("unknown sweep parameter: " + rest);
    }
    std::vector<double> values;
    for (const auto& item : split_list(value)) values.push_back(parse_double(key, item));
    if (values.empty()) throw ConfigError("empty sweep list for key: " + key);
    pc.sweep_grid[rest] = std::move(values);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text) {
  ParsedConfig pc;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    apply_key(pc, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return pc;
}

ParsedConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["master_seed"] = std::to_string(cfg.master_seed);
  {
    std::string dims;
    for (std::size_t i = 0; i < cfg.hidden_dims.size(); ++i) {
      if (i) dims += ',';
      dims += std::to_string(cfg.hidden_dims[i]);
    }
    kv["model.hidden_dims"] = dims;
  }
  kv["model.activation"] = to_string(cfg.activation);
  kv["task.dim"] = std::to_string(cfg.task.dim);
  kv["task.num_classes"] = std::to_string(cfg.task.num_classes);
  kv["task.base_fraction"] = format_double_roundtrip(cfg.task.base_fraction);
  kv["task.n_shots"] = std::to_string(cfg.task.n_shots);
  kv["task.shift_scale"] = format_double_roundtrip(cfg.task.shift_scale);
  kv["task.noise_sigma"] = format_double_roundtrip(cfg.task.noise_sigma);
  kv["task.pretrain_per_class"] = std::to_string(cfg.task.pretrain_per_class);
  kv["task.eval_per_class"] = std::to_string(cfg.task.eval_per_class);
  const auto train_kv = [&kv](const std::string& prefix, const TrainConfig& tc) {
    kv[prefix + ".learning_rate"] = format_double_roundtrip(tc.learning_rate);
    kv[prefix + ".epochs"] = std::to_string(tc.epochs);
    kv[prefix + ".batch_size"] = std::to_string(tc.batch_size);
    kv[prefix + ".lr_schedule"] = to_string(tc.lr_schedule);
  };
  train_kv("pretrain", cfg.pretrain);
  train_kv("finetune", cfg.finetune);
  train_kv("mergetune", cfg.mergetune.optimizer);
  kv["mergetune.lambda"] = format_double_roundtrip(cfg.mergetune.lambda);
  kv["mergetune.beta"] = format_double_roundtrip(cfg.mergetune.beta);
  kv["mergetune.n_alpha"] = std::to_string(cfg.mergetune.n_alpha);
  kv["mergetune.tau"] = format_double_roundtrip(cfg.mergetune.tau);
  {
    std::string methods;
    for (std::size_t i = 0; i < cfg.merges.size(); ++i) {
      if (i) methods += ',';
      methods += to_string(cfg.merges[i].method);
    }
    kv["merge.methods"] = methods;
    if (!cfg.merges.empty()) {
      kv["merge.alpha"] = format_double_roundtrip(cfg.merges.front().alpha);
      kv["merge.density"] = format_double_roundtrip(cfg.merges.front().density);
      kv["merge.drop_p"] = format_double_roundtrip(cfg.merges.front().drop_p);
    }
  }
  kv["probe.n_points"] = std::to_string(cfg.probe_points);
  kv["ensemble.enabled"] = cfg.ensemble_with_zero_shot ? "true" : "false";
  kv["ensemble.alpha"] = format_double_roundtrip(cfg.ensemble_alpha);

  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

}  // namespace mtune
