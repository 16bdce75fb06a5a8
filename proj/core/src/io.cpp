// SPDX-License-Identifier: Apache-2.0
#include "mtune/harness/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mtune/errors.hpp"

namespace mtune {
namespace {

using nlohmann::json;

json spec_to_json(const ModelSpec& spec) {
  return json{{"input_dim", spec.input_dim},
              {"hidden_dims", spec.hidden_dims},
              {"num_classes", spec.num_classes},
              {"activation", to_string(spec.activation)}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  spec.input_dim = j.at("input_dim").get<int>();
  spec.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
  spec.num_classes = j.at("num_classes").get<int>();
  spec.activation = activation_from_string(j.at("activation").get<std::string>());
  return spec;
}

json train_config_to_json(const TrainConfig& cfg) {
  return json{{"learning_rate", cfg.learning_rate},
              {"epochs", cfg.epochs},
              {"batch_size", cfg.batch_size},
              {"seed", cfg.seed},
              {"lr_schedule", to_string(cfg.lr_schedule)}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig cfg;
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.lr_schedule = lr_schedule_from_string(j.at("lr_schedule").get<std::string>());
  return cfg;
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void write_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write file: " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

std::string format_double_roundtrip(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_double_table(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  json layout = json::array();
  for (const auto& seg : ckpt.params.layout()) {
    layout.push_back(json{{"name", seg.name}, {"shape", seg.shape}});
  }
  json j{{"format_version", 1},
         {"spec", spec_to_json(ckpt.spec)},
         {"layout", layout},
         {"seed", ckpt.seed},
         {"provenance", json{{"kind", to_string(ckpt.provenance)}, {"lineage", ckpt.lineage}}},
         {"values", std::vector<double>(ckpt.params.values().begin(), ckpt.params.values().end())}};
  j["train_config"] = ckpt.train_config ? train_config_to_json(*ckpt.train_config) : json(nullptr);
  write_file(j, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  json j = parse_file(path);
  try {
    if (!j.contains("format_version")) {
      throw FormatError("checkpoint missing field: format_version");
    }
    if (j.at("format_version").get<int>() != 1) {
      throw FormatError("checkpoint has unsupported format_version");
    }
    for (const char* field : {"spec", "layout", "seed", "provenance", "values"}) {
      if (!j.contains(field)) throw FormatError(std::string("checkpoint missing field: ") + field);
    }

    Checkpoint ckpt;
    ckpt.spec = spec_from_json(j.at("spec"));
    ckpt.seed = j.at("seed").get<std::uint64_t>();
    ckpt.provenance = provenance_from_string(j.at("provenance").at("kind").get<std::string>());
    ckpt.lineage = j.at("provenance").at("lineage").get<std::string>();
    if (j.contains("train_config") && !j.at("train_config").is_null()) {
      ckpt.train_config = train_config_from_json(j.at("train_config"));
    }

    auto layout = std::make_shared<Layout>();
    for (const auto& seg : j.at("layout")) {
      layout->push_back(
          {seg.at("name").get<std::string>(), seg.at("shape").get<std::vector<std::int64_t>>()});
    }
    auto values = j.at("values").get<std::vector<double>>();
    if (static_cast<std::int64_t>(values.size()) != layout_elements(*layout)) {
      throw FormatError("checkpoint field 'values' truncated or padded: has " +
                        std::to_string(values.size()) + " elements, layout declares " +
                        std::to_string(layout_elements(*layout)));
    }
    // Cross-check the declared layout against the spec before use.
    if (!(*layout == *layout_for(ckpt.spec))) {
      throw CompatibilityError("checkpoint layout does not match its model spec");
    }
    ckpt.params = ParamVector(std::move(layout), std::move(values));
    return ckpt;
  } catch (const json::exception& e) {
    throw FormatError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  auto inputs = ds.raw_inputs();
  json j{{"format_version", 1},
         {"dim", ds.dim()},
         {"num_classes", ds.num_classes()},
         {"inputs", std::vector<double>(inputs.begin(), inputs.end())},
         {"labels", std::vector<int>(ds.raw_labels().begin(), ds.raw_labels().end())}};
  write_file(j, path);
}

Dataset load_dataset(const std::filesystem::path& path) {
  json j = parse_file(path);
  try {
    if (!j.contains("format_version")) throw FormatError("dataset missing field: format_version");
    for (const char* field : {"dim", "num_classes", "inputs", "labels"}) {
      if (!j.contains(field)) throw FormatError(std::string("dataset missing field: ") + field);
    }
    auto inputs = j.at("inputs").get<std::vector<double>>();
    auto labels = j.at("labels").get<std::vector<int>>();
    const int dim = j.at("dim").get<int>();
    if (inputs.size() != labels.size() * static_cast<std::size_t>(dim)) {
      throw FormatError("dataset field 'inputs' inconsistent with 'labels' and 'dim'");
    }
    return Dataset(dim, j.at("num_classes").get<int>(), std::move(inputs), std::move(labels));
  } catch (const json::exception& e) {
    throw FormatError("malformed dataset " + path.string() + ": " + e.what());
  }
}

void write_probe_csv(const PathProbe& probe, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write file: " + path.string());
  out << "alpha,loss,accuracy\n";
  for (std::size_t i = 0; i < probe.alphas.size(); ++i) {
    out << format_double_roundtrip(probe.alphas[i]) << ','
        << format_double_roundtrip(probe.losses[i]) << ','
        << format_double_roundtrip(probe.accuracies[i]) << '\n';
  }
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write file: " + path.string());
  out << "method,base_acc,novel_acc,hm\n";
  for (const auto& r : rows) {
    out << r.method << ',' << format_double_table(r.base_acc) << ','
        << format_double_table(r.novel_acc) << ',' << format_double_table(r.hm) << '\n';
  }
}

std::vector<ReportRow> read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "method,base_acc,novel_acc,hm") {
    throw FormatError("report CSV missing header: " + path.string());
  }
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    ReportRow r;
    std::string field;
    if (!std::getline(ss, r.method, ',')) throw FormatError("bad report row: " + line);
    try {
      std::getline(ss, field, ',');
      r.base_acc = std::stod(field);
      std::getline(ss, field, ',');
      r.novel_acc = std::stod(field);
      std::getline(ss, field, ',');
      r.hm = std::stod(field);
    } catch (const std::exception&) {
      throw FormatError("bad report row: " + line);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace mtune
