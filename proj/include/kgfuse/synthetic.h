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

// Seeded generator of small multilingual graph families with known
// alignments, for end-to-end runs without real data.
//
// Every graph holds `shared_entities` entities that denote the same concept
// across all graphs plus private ones, and a common relation vocabulary.
// Each entity heads `triples_per_head` triples; for shared heads all but one
// of those triples are facts common to every graph. Gold alignments are
// emitted for every graph pair (i < j) and are transitively consistent.

#ifndef KGFUSE_SYNTHETIC_H_
#define KGFUSE_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kgfuse/ingest.h"

namespace kgfuse {

struct SyntheticConfig {
  std::size_t graphs = 2;
  std::size_t entities = 200;
  std::size_t shared_entities = 150;
  std::size_t relations = 12;
  std::size_t triples_per_head = 3;
  std::uint64_t seed = 7;
  // Cycled over the graphs. Supported styles: "zh", "ja", "fr", and Latin
  // pseudo-words for anything else.
  std::vector<std::string> langs = {"zh", "en", "fr", "ja"};
};

// Graph ids are 1..graphs; entity and relation ids of graph g occupy a
// disjoint range per graph in shuffled order. Throws ConfigError for
// inconsistent sizes.
DatasetBundle make_synthetic(const SyntheticConfig& config);

// Writes graph_<id>.kg, gold_<s>_<t>.tsv and relation_gold_<s>_<t>.tsv.
void save_bundle(const DatasetBundle& bundle,
                 const std::filesystem::path& directory);

}  // namespace kgfuse

#endif  // KGFUSE_SYNTHETIC_H_
