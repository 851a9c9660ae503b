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

// Run configuration: a flat JSON object whose keys are mirrored one-to-one by
// command-line flags (underscores become dashes, e.g. char_budget and
// --char-budget). Flags override the file.

#ifndef KGFUSE_TOOLS_RUN_CONFIG_H_
#define KGFUSE_TOOLS_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgfuse/backend.h"
#include "kgfuse/ingest.h"
#include "kgfuse/oracle_backend.h"
#include "kgfuse/pipeline.h"

namespace kgfuse::cli {

// A gold file for one ordered graph pair, written "<source>:<target>:<path>".
struct PairFile {
  GraphId source;
  GraphId target;
  std::filesystem::path path;
};

PairFile parse_pair_file(std::string_view spec);

struct RunConfig {
  // "dbp15k" or "generic".
  std::string dataset_kind = "generic";
  // DBP15K directory (the pair directory or its parent).
  std::filesystem::path dataset_path;
  std::string dbp15k_pair = "zh_en";
  // Generic-format graph files.
  std::vector<std::filesystem::path> graphs;
  std::vector<PairFile> gold;
  std::vector<PairFile> relation_gold;
  // Integration order by graph id; empty keeps the load order.
  std::vector<std::uint32_t> graph_order;

  std::size_t char_budget = 12000;
  double tau = 0.90;
  bool bijective = false;
  std::size_t workers = 4;

  BackendConfig backend;
  std::uint64_t seed = 0;
  double fp_rate = 0.0;
  ConfidenceDistribution tp_confidence{0.980, 0.02};
  ConfidenceDistribution fp_confidence{0.738, 0.10};

  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> checkpoint_dir;
  std::filesystem::path output_dir = "kgfuse_out";
  std::optional<std::filesystem::path> prompt_dir;
  std::string log_level = "info";
};

enum class FieldType { kString, kPath, kUInt, kDouble, kBool, kPathList,
                       kPairFileList, kUIntList };

struct FieldInfo {
  std::string_view key;
  FieldType type;
  std::string_view help;
};

// Every configuration key, in documentation order.
std::span<const FieldInfo> config_fields();

// Builds a configuration from defaults overlaid with `object`. Relative
// paths resolve against `base_dir`. Throws ConfigError for unknown keys and
// wrongly typed values.
RunConfig config_from_json(const nlohmann::json& object,
                           const std::filesystem::path& base_dir,
                           RunConfig base = {});

RunConfig load_config_file(const std::filesystem::path& path);

// Converts a flag's textual value to the JSON type of `field`. List fields
// take comma-separated values.
nlohmann::json flag_value_to_json(const FieldInfo& field,
                                  const std::vector<std::string>& values);

nlohmann::json config_to_json(const RunConfig& config);

// Range and consistency checks that need no file access.
void validate(const RunConfig& config);

PipelineConfig pipeline_config(const RunConfig& config);
OracleConfig oracle_config(const RunConfig& config,
                           const DatasetBundle& bundle);

// Loads the dataset and applies graph_order. Missing paths raise ConfigError
// naming the path; malformed files raise DataError.
DatasetBundle load_dataset(const RunConfig& config);

}  // namespace kgfuse::cli

#endif  // KGFUSE_TOOLS_RUN_CONFIG_H_
