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

// Dataset loaders: DBP15K directories, the line-oriented generic graph
// format (see docs/formats.md), and tab-separated gold alignment files.

#ifndef KGFUSE_INGEST_H_
#define KGFUSE_INGEST_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgfuse/kg_model.h"

namespace kgfuse {

// Gold entity correspondences from a source graph into a target graph.
// At most one target per source id.
struct GoldAlignment {
  GraphId source_graph;
  GraphId target_graph;
  std::map<EntityId, EntityId> pairs;

  std::size_t size() const { return pairs.size(); }
};

// Gold relation correspondences. Not scored; only used to seed the oracle
// backend so relation folding can be exercised.
struct RelationGold {
  GraphId source_graph;
  GraphId target_graph;
  std::map<RelationId, RelationId> pairs;
};

struct DatasetBundle {
  std::vector<KnowledgeGraph> graphs;
  std::vector<GoldAlignment> gold;
  std::vector<RelationGold> relation_gold;

  const GoldAlignment* find_gold(GraphId source, GraphId target) const;
};

// Label rule for DBpedia URIs: last path segment, percent-decoded, with
// underscores turned into spaces.
std::string label_from_uri(std::string_view uri);

// Loads a DBP15K language pair such as "zh_en". `directory` may be either the
// pair directory itself or its parent. Graph 1 gets GraphId 1 and the
// language before the underscore; graph 2 gets GraphId 2. Gold pairs from
// ref_ent_ids and (when present) sup_ent_ids are merged into one set.
DatasetBundle load_dbp15k(const std::filesystem::path& directory,
                          std::string_view pair_name);

// Reads one graph in the generic format. Recoverable oddities (such as an
// empty triple section) are appended to `warnings` when it is non-null.
KnowledgeGraph load_generic(const std::filesystem::path& path,
                            std::vector<std::string>* warnings = nullptr);
KnowledgeGraph read_generic(std::istream& in, std::string_view source_name,
                            std::vector<std::string>* warnings = nullptr);

void write_generic(const KnowledgeGraph& graph, std::ostream& out);
void save_generic(const KnowledgeGraph& graph,
                  const std::filesystem::path& path);

// Two tab-separated integer columns per line: source id, target id. Every id
// must exist in its graph.
GoldAlignment load_gold_tsv(const std::filesystem::path& path,
                            const KnowledgeGraph& source,
                            const KnowledgeGraph& target);
RelationGold load_relation_gold_tsv(const std::filesystem::path& path,
                                    const KnowledgeGraph& source,
                                    const KnowledgeGraph& target);
void save_gold_tsv(const GoldAlignment& gold,
                   const std::filesystem::path& path);
void save_relation_gold_tsv(const RelationGold& gold,
                            const std::filesystem::path& path);

}  // namespace kgfuse

#endif  // KGFUSE_INGEST_H_
