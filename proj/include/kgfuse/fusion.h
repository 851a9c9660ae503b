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

// The unified graph and the agglomeration step that folds one more input
// graph into it.

#ifndef KGFUSE_FUSION_H_
#define KGFUSE_FUSION_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include "kgfuse/aggregator.h"
#include "kgfuse/kg_model.h"

namespace kgfuse {

struct MergeRecord {
  int iteration = 0;
  AlignmentKind kind = AlignmentKind::kEntity;
  // Canonical id the incoming node was aligned to (before any later merge).
  std::uint32_t canonical = 0;
  GraphId graph;
  std::uint32_t original = 0;
  double confidence = 0.0;
  // The incoming node was already taken by another canonical node in the same
  // step, so the two canonical nodes were merged as well.
  bool conflict = false;

  friend bool operator==(const MergeRecord&, const MergeRecord&) = default;
};

// The evolving fused graph. Every node of every integrated input graph maps
// to exactly one canonical id; a canonical node carries the union of its
// constituents' labels, survivors' labels first.
class UnifiedGraph {
 public:
  UnifiedGraph() = default;

  // The first input graph becomes the unified graph unchanged, keeping its
  // ids as canonical ids.
  static UnifiedGraph from_graph(const KnowledgeGraph& first);

  static UnifiedGraph restore(KnowledgeGraph graph, std::vector<GraphId> members,
                              std::map<EntityRef, EntityId> entity_origins,
                              std::map<RelationRef, RelationId> relation_origins,
                              std::vector<MergeRecord> merges);

  const KnowledgeGraph& graph() const { return graph_; }
  // Integrated input graphs in order.
  const std::vector<GraphId>& members() const { return members_; }
  const std::map<EntityRef, EntityId>& entity_origins() const {
    return entity_origins_;
  }
  // The folded-relation table.
  const std::map<RelationRef, RelationId>& relation_origins() const {
    return relation_origins_;
  }
  const std::vector<MergeRecord>& merges() const { return merges_; }

  // Throw DataError for nodes of graphs that were never integrated.
  EntityId canonical_entity(const EntityRef& ref) const;
  RelationId canonical_relation(const RelationRef& ref) const;

  friend bool operator==(const UnifiedGraph&, const UnifiedGraph&) = default;

 private:
  friend UnifiedGraph fuse_step(const UnifiedGraph&, const KnowledgeGraph&,
                                const AlignmentSet&, int);

  KnowledgeGraph graph_;
  std::vector<GraphId> members_;
  std::map<EntityRef, EntityId> entity_origins_;
  std::map<RelationRef, RelationId> relation_origins_;
  std::vector<MergeRecord> merges_;
};

// Folds `incoming` into `unified` using already-thresholded alignments whose
// sources are canonical ids of `unified` and whose targets are ids of
// `incoming`.
//  - Aligned incoming nodes join the canonical node of their source. When two
//    canonical nodes claim the same incoming node they are merged; the
//    smaller (earlier) canonical id survives and a conflict record is kept.
//  - Unaligned incoming nodes get fresh ids above every existing one,
//    assigned in ascending original-id order.
//  - All triples are rewritten through canonical ids and deduplicated.
// Throws DataError if an alignment names an unknown id.
UnifiedGraph fuse_step(const UnifiedGraph& unified,
                       const KnowledgeGraph& incoming,
                       const AlignmentSet& alignments, int iteration);

// Provenance sidecar: origin and merge records as tab-separated lines.
void write_provenance(const UnifiedGraph& unified, std::ostream& out);
void save_provenance(const UnifiedGraph& unified,
                     const std::filesystem::path& path);

}  // namespace kgfuse

#endif  // KGFUSE_FUSION_H_
