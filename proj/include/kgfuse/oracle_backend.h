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

// A deterministic offline backend that answers alignment prompts from a
// ground-truth dictionary, with configurable false positives and confidence
// noise.
//
// The oracle reads the user payload the way a model would: it splits each
// triple line of the SOURCE and TARGET blocks back into head, relation and
// tail labels by looking them up in the input graphs it was given. Source
// labels are looked up in the graphs listed in PromptMeta::source_graphs
// (every graph except the target when that list is empty), target labels in
// PromptMeta::target_graph.
//
// For every distinct source entity, in order of first appearance:
//   - with probability fp_rate it is aligned to a uniformly chosen target
//     entity of the block outside its gold cluster, at an fp_confidence draw
//     (nothing is emitted if no such entity exists);
//   - otherwise it is aligned to every target entity of the block in its gold
//     cluster, each at a tp_confidence draw.
// Relations in the same gold cluster are always aligned at tp confidence.
// Gold clusters are the transitive closure of the configured pairs.
//
// Random draws come from a generator seeded by (seed, digest of the prompt),
// so answers do not depend on call order or thread count.

#ifndef KGFUSE_ORACLE_BACKEND_H_
#define KGFUSE_ORACLE_BACKEND_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgfuse/backend.h"
#include "kgfuse/kg_model.h"

namespace kgfuse {

struct ConfidenceDistribution {
  double mean = 1.0;
  double sd = 0.0;
};

struct OracleConfig {
  std::vector<std::pair<EntityRef, EntityRef>> entity_pairs;
  std::vector<std::pair<RelationRef, RelationRef>> relation_pairs;
  // Draws are clipped to [0, 1].
  ConfidenceDistribution tp_confidence{0.980, 0.02};
  ConfidenceDistribution fp_confidence{0.738, 0.10};
  double fp_rate = 0.0;
  std::uint64_t seed = 0;
};

// Throws ConfigError.
void validate(const OracleConfig& config);

class OracleBackend final : public AlignmentBackend {
 public:
  OracleBackend(OracleConfig config, std::vector<KnowledgeGraph> graphs);

  RawResponse submit(const Prompt& prompt) override;

 private:
  struct GraphEntry {
    LabelIndex index;
  };
  struct LineRefs {
    EntityRef head;
    RelationRef relation;
    EntityRef tail;
    std::string head_text;
    std::string relation_text;
    std::string tail_text;
  };

  std::optional<LineRefs> split_line(std::string_view line,
                                     std::span<const GraphId> graphs) const;

  OracleConfig config_;
  std::map<GraphId, GraphEntry> entries_;
  std::map<EntityRef, std::uint64_t> entity_clusters_;
  std::map<RelationRef, std::uint64_t> relation_clusters_;
};

// Oracle dictionary entries for a whole bundle of gold alignments.
std::vector<std::pair<EntityRef, EntityRef>> gold_entity_pairs(
    GraphId source, GraphId target, const std::map<EntityId, EntityId>& pairs);
std::vector<std::pair<RelationRef, RelationRef>> gold_relation_pairs(
    GraphId source, GraphId target,
    const std::map<RelationId, RelationId>& pairs);

}  // namespace kgfuse

#endif  // KGFUSE_ORACLE_BACKEND_H_
