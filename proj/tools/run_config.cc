// Copyright 2026 The kgfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "run_config.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "kgfuse/errors.h"
#include "kgfuse/text_util.h"

namespace kgfuse::cli {
namespace {

using nlohmann::json;

constexpr std::array kFields = {
    FieldInfo{"dataset_kind", FieldType::kString,
              "Dataset layout: dbp15k or generic"},
    FieldInfo{"dataset_path", FieldType::kPath, "DBP15K directory"},
    FieldInfo{"dbp15k_pair", FieldType::kString,
              "DBP15K language pair, e.g. zh_en"},
    FieldInfo{"graphs", FieldType::kPathList, "Generic-format graph files"},
    FieldInfo{"gold", FieldType::kPairFileList,
              "Entity gold files as <source>:<target>:<path>"},
    FieldInfo{"relation_gold", FieldType::kPairFileList,
              "Relation gold files as <source>:<target>:<path>"},
    FieldInfo{"graph_order", FieldType::kUIntList,
              "Graph ids in integration order"},
    FieldInfo{"char_budget", FieldType::kUInt,
              "Batch budget in linearized characters"},
    FieldInfo{"tau", FieldType::kDouble, "Confidence acceptance threshold"},
    FieldInfo{"bijective", FieldType::kBool,
              "Greedy one-to-one alignment instead of per-source argmax"},
    FieldInfo{"workers", FieldType::kUInt, "Concurrent batch-pair workers"},
    FieldInfo{"backend", FieldType::kString, "Backend: oracle or http-llm"},
    FieldInfo{"model_name", FieldType::kString, "Model name"},
    FieldInfo{"temperature", FieldType::kDouble, "Sampling temperature"},
    FieldInfo{"endpoint", FieldType::kString,
              "Chat-completions endpoint URL"},
    FieldInfo{"api_key_env", FieldType::kString,
              "Environment variable holding the API key"},
    FieldInfo{"requests_per_minute", FieldType::kUInt, "Request rate limit"},
    FieldInfo{"timeout_seconds", FieldType::kUInt, "HTTP request timeout"},
    FieldInfo{"max_retries", FieldType::kUInt, "Retries per request"},
    FieldInfo{"max_output_tokens", FieldType::kUInt,
              "Completion token limit per request"},
    FieldInfo{"seed", FieldType::kUInt, "Oracle random seed"},
    FieldInfo{"fp_rate", FieldType::kDouble,
              "Oracle false-positive rate per source entity"},
    FieldInfo{"tp_confidence_mean", FieldType::kDouble,
              "Oracle true-positive confidence mean"},
    FieldInfo{"tp_confidence_sd", FieldType::kDouble,
              "Oracle true-positive confidence standard deviation"},
    FieldInfo{"fp_confidence_mean", FieldType::kDouble,
              "Oracle false-positive confidence mean"},
    FieldInfo{"fp_confidence_sd", FieldType::kDouble,
              "Oracle false-positive confidence standard deviation"},
    FieldInfo{"cache_dir", FieldType::kPath, "Response cache directory"},
    FieldInfo{"checkpoint_dir", FieldType::kPath,
              "Checkpoint directory (enables resume)"},
    FieldInfo{"output_dir", FieldType::kPath, "Directory for all outputs"},
    FieldInfo{"prompt_dir", FieldType::kPath,
              "Directory with system.txt and user.txt prompt templates"},
    FieldInfo{"log_level", FieldType::kString,
              "trace, debug, info, warn, error or off"},
};

const FieldInfo* find_field(std::string_view key) {
  for (const auto& f : kFields) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_relative() && !base.empty() ? base / p : p;
}

[[noreturn]] void type_error(std::string_view key, std::string_view expected) {
  throw ConfigError(fmt::format("config key '{}' must be {}", key, expected));
}

std::string as_string(std::string_view key, const json& v) {
  if (!v.is_string()) type_error(key, "a string");
  return v.get<std::string>();
}

std::uint64_t as_uint(std::string_view key, const json& v) {
  const bool ok = v.is_number_unsigned() ||
                  (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!ok) type_error(key, "a non-negative integer");
  return v.get<std::uint64_t>();
}

double as_double(std::string_view key, const json& v) {
  if (!v.is_number()) type_error(key, "a number");
  return v.get<double>();
}

bool as_bool(std::string_view key, const json& v) {
  if (!v.is_boolean()) type_error(key, "true or false");
  return v.get<bool>();
}

std::vector<json> as_list(std::string_view key, const json& v) {
  if (!v.is_array()) type_error(key, "a list");
  return std::vector<json>(v.begin(), v.end());
}

std::string pair_file_spec(const PairFile& p) {
  return fmt::format("{}:{}:{}", p.source.value, p.target.value,
                     p.path.string());
}

void require_exists(const std::filesystem::path& path, std::string_view what) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError(fmt::format("{} does not exist: {}", what, path.string()));
  }
}

const KnowledgeGraph& graph_by_id(const DatasetBundle& bundle, GraphId id) {
  for (const auto& g : bundle.graphs) {
    if (g.id() == id) return g;
  }
  throw ConfigError(fmt::format("no loaded graph has id {}", id.value));
}

}  // namespace

PairFile parse_pair_file(std::string_view spec) {
  const auto first = spec.find(':');
  const auto second = first == std::string_view::npos
                          ? std::string_view::npos
                          : spec.find(':', first + 1);
  if (second == std::string_view::npos || second + 1 == spec.size()) {
    throw ConfigError(fmt::format(
        "gold file '{}' must be written <source>:<target>:<path>", spec));
  }
  const auto s = parse_u32(spec.substr(0, first));
  const auto t = parse_u32(spec.substr(first + 1, second - first - 1));
  if (!s || !t) {
    throw ConfigError(fmt::format("gold file '{}' has bad graph ids", spec));
  }
  return PairFile{GraphId{*s}, GraphId{*t},
                  std::filesystem::path(spec.substr(second + 1))};
}

std::span<const FieldInfo> config_fields() { return kFields; }

RunConfig config_from_json(const json& object,
                           const std::filesystem::path& base_dir,
                           RunConfig c) {
  if (!object.is_object()) throw ConfigError("configuration must be an object");
  for (const auto& [key, v] : object.items()) {
    if (!find_field(key)) {
      throw ConfigError(fmt::format("unknown config key '{}'", key));
    }
    if (key == "dataset_kind") {
      c.dataset_kind = as_string(key, v);
    } else if (key == "dataset_path") {
      c.dataset_path = resolve(base_dir, as_string(key, v));
    } else if (key == "dbp15k_pair") {
      c.dbp15k_pair = as_string(key, v);
    } else if (key == "graphs") {
      c.graphs.clear();
      for (const auto& g : as_list(key, v)) {
        c.graphs.push_back(resolve(base_dir, as_string(key, g)));
      }
    } else if (key == "gold" || key == "relation_gold") {
      auto& list = key == "gold" ? c.gold : c.relation_gold;
      list.clear();
      for (const auto& g : as_list(key, v)) {
        auto pf = parse_pair_file(as_string(key, g));
        pf.path = resolve(base_dir, pf.path);
        list.push_back(std::move(pf));
      }
    } else if (key == "graph_order") {
      c.graph_order.clear();
      for (const auto& g : as_list(key, v)) {
        const auto id = as_uint(key, g);
        if (id > UINT32_MAX) type_error(key, "a list of graph ids");
        c.graph_order.push_back(static_cast<std::uint32_t>(id));
      }
    } else if (key == "char_budget") {
      c.char_budget = as_uint(key, v);
    } else if (key == "tau") {
      c.tau = as_double(key, v);
    } else if (key == "bijective") {
      c.bijective = as_bool(key, v);
    } else if (key == "workers") {
      c.workers = as_uint(key, v);
    } else if (key == "backend") {
      c.backend.kind = parse_backend_kind(as_string(key, v));
    } else if (key == "model_name") {
      c.backend.model_name = as_string(key, v);
    } else if (key == "temperature") {
      c.backend.temperature = as_double(key, v);
    } else if (key == "endpoint") {
      c.backend.endpoint = as_string(key, v);
    } else if (key == "api_key_env") {
      c.backend.api_key_env = as_string(key, v);
    } else if (key == "requests_per_minute") {
      c.backend.requests_per_minute = static_cast<int>(
          std::min<std::uint64_t>(as_uint(key, v), INT32_MAX));
    } else if (key == "timeout_seconds") {
      c.backend.timeout = std::chrono::seconds(as_uint(key, v));
    } else if (key == "max_retries") {
      c.backend.max_retries = static_cast<int>(
          std::min<std::uint64_t>(as_uint(key, v), INT32_MAX));
    } else if (key == "max_output_tokens") {
      c.backend.max_output_tokens = static_cast<int>(
          std::min<std::uint64_t>(as_uint(key, v), INT32_MAX));
    } else if (key == "seed") {
      c.seed = as_uint(key, v);
    } else if (key == "fp_rate") {
      c.fp_rate = as_double(key, v);
    } else if (key == "tp_confidence_mean") {
      c.tp_confidence.mean = as_double(key, v);
    } else if (key == "tp_confidence_sd") {
      c.tp_confidence.sd = as_double(key, v);
    } else if (key == "fp_confidence_mean") {
      c.fp_confidence.mean = as_double(key, v);
    } else if (key == "fp_confidence_sd") {
      c.fp_confidence.sd = as_double(key, v);
    } else if (key == "cache_dir") {
      c.cache_dir = resolve(base_dir, as_string(key, v));
    } else if (key == "checkpoint_dir") {
      c.checkpoint_dir = resolve(base_dir, as_string(key, v));
    } else if (key == "output_dir") {
      c.output_dir = resolve(base_dir, as_string(key, v));
    } else if (key == "prompt_dir") {
      c.prompt_dir = resolve(base_dir, as_string(key, v));
    } else if (key == "log_level") {
      c.log_level = as_string(key, v);
    }
  }
  return c;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  }
  json object = json::parse(in, nullptr, /*allow_exceptions=*/false,
                            /*ignore_comments=*/true);
  if (object.is_discarded()) {
    throw ConfigError(fmt::format("{} is not valid JSON", path.string()));
  }
  return config_from_json(object, path.parent_path());
}

json flag_value_to_json(const FieldInfo& field,
                        const std::vector<std::string>& values) {
  auto scalar = [&]() -> const std::string& {
    if (values.size() != 1) {
      throw ConfigError(fmt::format("--{} takes one value", field.key));
    }
    return values.front();
  };
  auto bad = [&](std::string_view v) -> ConfigError {
    return ConfigError(fmt::format("bad value '{}' for {}", v, field.key));
  };
  auto split = [&] {
    std::vector<std::string> out;
    for (const auto& v : values) {
      std::string_view rest = v;
      while (true) {
        const auto comma = rest.find(',');
        if (!rest.substr(0, comma).empty()) {
          out.emplace_back(rest.substr(0, comma));
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
    }
    return out;
  };
  auto to_uint = [&](const std::string& v) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw bad(v);
    return out;
  };

  switch (field.type) {
    case FieldType::kString:
    case FieldType::kPath:
      return scalar();
    case FieldType::kUInt:
      return to_uint(scalar());
    case FieldType::kDouble: {
      const auto d = parse_double(scalar());
      if (!d) throw bad(scalar());
      return *d;
    }
    case FieldType::kBool: {
      const auto& v = scalar();
      if (v == "true" || v == "1") return true;
      if (v == "false" || v == "0") return false;
      throw bad(v);
    }
    case FieldType::kPathList:
    case FieldType::kPairFileList:
      return split();
    case FieldType::kUIntList: {
      json out = json::array();
      for (const auto& v : split()) out.push_back(to_uint(v));
      return out;
    }
  }
  throw bad(field.key);
}

json config_to_json(const RunConfig& c) {
  json graphs = json::array();
  for (const auto& g : c.graphs) graphs.push_back(g.string());
  json gold = json::array();
  for (const auto& g : c.gold) gold.push_back(pair_file_spec(g));
  json relation_gold = json::array();
  for (const auto& g : c.relation_gold) {
    relation_gold.push_back(pair_file_spec(g));
  }
  json out{
      {"dataset_kind", c.dataset_kind},
      {"dataset_path", c.dataset_path.string()},
      {"dbp15k_pair", c.dbp15k_pair},
      {"graphs", std::move(graphs)},
      {"gold", std::move(gold)},
      {"relation_gold", std::move(relation_gold)},
      {"graph_order", c.graph_order},
      {"char_budget", c.char_budget},
      {"tau", c.tau},
      {"bijective", c.bijective},
      {"workers", c.workers},
      {"backend", to_string(c.backend.kind)},
      {"model_name", c.backend.model_name},
      {"temperature", c.backend.temperature},
      {"endpoint", c.backend.endpoint},
      {"api_key_env", c.backend.api_key_env},
      {"requests_per_minute", c.backend.requests_per_minute},
      {"timeout_seconds", c.backend.timeout.count()},
      {"max_retries", c.backend.max_retries},
      {"max_output_tokens", c.backend.max_output_tokens},
      {"seed", c.seed},
      {"fp_rate", c.fp_rate},
      {"tp_confidence_mean", c.tp_confidence.mean},
      {"tp_confidence_sd", c.tp_confidence.sd},
      {"fp_confidence_mean", c.fp_confidence.mean},
      {"fp_confidence_sd", c.fp_confidence.sd},
      {"output_dir", c.output_dir.string()},
      {"log_level", c.log_level},
  };
  if (c.cache_dir) out["cache_dir"] = c.cache_dir->string();
  if (c.checkpoint_dir) out["checkpoint_dir"] = c.checkpoint_dir->string();
  if (c.prompt_dir) out["prompt_dir"] = c.prompt_dir->string();
  return out;
}

void validate(const RunConfig& c) {
  if (c.dataset_kind != "dbp15k" && c.dataset_kind != "generic") {
    throw ConfigError(fmt::format(
        "dataset_kind must be dbp15k or generic, not '{}'", c.dataset_kind));
  }
  if (c.char_budget == 0) throw ConfigError("char_budget must be positive");
  if (!(c.tau >= 0.0 && c.tau <= 1.0)) {
    throw ConfigError("tau must lie in [0, 1]");
  }
  if (c.workers < 1) throw ConfigError("workers must be at least 1");
  validate(c.backend);
  validate(oracle_config(c, DatasetBundle{}));
  static constexpr std::array kLevels = {"trace", "debug", "info", "warn",
                                         "error", "off"};
  if (std::find(kLevels.begin(), kLevels.end(), c.log_level) ==
      kLevels.end()) {
    throw ConfigError(fmt::format("unknown log_level '{}'", c.log_level));
  }
}

PipelineConfig pipeline_config(const RunConfig& c) {
  PipelineConfig p;
  p.partition.char_budget = c.char_budget;
  p.tau = c.tau;
  p.workers = c.workers;
  p.aggregate.bijective = c.bijective;
  p.model_name = c.backend.model_name;
  p.temperature = c.backend.temperature;
  p.checkpoint_dir = c.checkpoint_dir;
  if (c.prompt_dir) {
    require_exists(*c.prompt_dir, "prompt directory");
    p.prompts = load_prompt_template(*c.prompt_dir);
  }
  return p;
}

OracleConfig oracle_config(const RunConfig& c, const DatasetBundle& bundle) {
  OracleConfig o;
  for (const auto& gold : bundle.gold) {
    auto pairs =
        gold_entity_pairs(gold.source_graph, gold.target_graph, gold.pairs);
    o.entity_pairs.insert(o.entity_pairs.end(), pairs.begin(), pairs.end());
  }
  for (const auto& gold : bundle.relation_gold) {
    auto pairs =
        gold_relation_pairs(gold.source_graph, gold.target_graph, gold.pairs);
    o.relation_pairs.insert(o.relation_pairs.end(), pairs.begin(),
                            pairs.end());
  }
  o.tp_confidence = c.tp_confidence;
  o.fp_confidence = c.fp_confidence;
  o.fp_rate = c.fp_rate;
  o.seed = c.seed;
  return o;
}

DatasetBundle load_dataset(const RunConfig& c) {
  DatasetBundle bundle;
  if (c.dataset_kind == "dbp15k") {
    if (c.dataset_path.empty()) throw ConfigError("dataset_path is not set");
    require_exists(c.dataset_path, "dataset path");
    bundle = load_dbp15k(c.dataset_path, c.dbp15k_pair);
  } else {
    if (c.graphs.empty()) throw ConfigError("no graphs are configured");
    for (const auto& path : c.graphs) {
      require_exists(path, "graph file");
      std::vector<std::string> warnings;
      bundle.graphs.push_back(load_generic(path, &warnings));
      for (const auto& w : warnings) spdlog::warn("{}", w);
    }
  }
  for (const auto& g : c.gold) {
    require_exists(g.path, "gold file");
    bundle.gold.push_back(load_gold_tsv(g.path, graph_by_id(bundle, g.source),
                                        graph_by_id(bundle, g.target)));
  }
  for (const auto& g : c.relation_gold) {
    require_exists(g.path, "relation gold file");
    bundle.relation_gold.push_back(
        load_relation_gold_tsv(g.path, graph_by_id(bundle, g.source),
                               graph_by_id(bundle, g.target)));
  }
  if (!c.graph_order.empty()) {
    std::vector<KnowledgeGraph> ordered;
    for (auto id : c.graph_order) {
      const auto& g = graph_by_id(bundle, GraphId{id});
      if (std::any_of(ordered.begin(), ordered.end(),
                      [&](const KnowledgeGraph& o) { return o.id() == g.id(); })) {
        throw ConfigError(fmt::format("graph_order repeats graph {}", id));
      }
      ordered.push_back(g);
    }
    bundle.graphs = std::move(ordered);
  }
  return bundle;
}

}  // namespace kgfuse::cli
