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

#include "kgfuse/fusion.h"

#include <algorithm>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "kgfuse/disjoint_set.h"
#include "kgfuse/errors.h"

namespace kgfuse {
namespace {

constexpr std::string_view kUnifiedLang = "mul";

void append_unique(LabelSet& into, const LabelSet& labels) {
  for (const auto& label : labels) {
    if (std::find(into.begin(), into.end(), label) == into.end()) {
      into.push_back(label);
    }
  }
}

// Folds one node kind (entities or relations) of `incoming` into the
// canonical node table. Returns incoming id -> canonical id. `sets` ends up
// holding the merges among existing canonical ids.
template <typename Id>
std::map<Id, Id> fold_nodes(const std::map<Id, LabelSet>& existing,
                            const std::map<Id, LabelSet>& incoming,
                            const AlignmentTable<Id>& table,
                            GraphId incoming_graph, int iteration,
                            AlignmentKind kind, DisjointSet<Id>& sets,
                            std::vector<MergeRecord>& merges,
                            std::map<Id, LabelSet>& nodes_out) {
  for (const auto& [source, c] : table.chosen) {
    if (!existing.contains(source) || !incoming.contains(c.target)) {
      throw DataError(fmt::format(
          "fuse_step: {} alignment {} -> {} references an unknown id",
          to_string(kind), source.value, c.target.value));
    }
  }

  std::map<Id, Id> mapping;
  for (const auto& [source, c] : table.chosen) {
    MergeRecord record{iteration,      kind,         source.value,
                       incoming_graph, c.target.value, c.confidence,
                       false};
    auto [it, inserted] = mapping.try_emplace(c.target, source);
    if (!inserted && sets.find(it->second) != sets.find(source)) {
      sets.unite(it->second, source);
      record.conflict = true;
    }
    merges.push_back(record);
  }
  for (auto& [target, canonical] : mapping) canonical = sets.find(canonical);

  std::uint32_t next = existing.empty() ? 0 : existing.rbegin()->first.value + 1;
  for (const auto& [id, labels] : incoming) {
    if (!mapping.contains(id)) mapping.emplace(id, Id{next++});
  }

  // Ascending order visits each survivor before the ids merged into it.
  for (const auto& [id, labels] : existing) {
    append_unique(nodes_out[sets.find(id)], labels);
  }
  for (const auto& [id, labels] : incoming) {
    append_unique(nodes_out[mapping.at(id)], labels);
  }
  return mapping;
}

}  // namespace

UnifiedGraph UnifiedGraph::from_graph(const KnowledgeGraph& first) {
  UnifiedGraph u;
  std::vector<Triple> triples(first.triples().begin(), first.triples().end());
  u.graph_ = build_graph(kUnifiedGraphId, std::string(kUnifiedLang),
                         first.entities(), first.relations(), triples);
  u.members_.push_back(first.id());
  for (const auto& [id, labels] : first.entities()) {
    u.entity_origins_.emplace(EntityRef{first.id(), id}, id);
  }
  for (const auto& [id, labels] : first.relations()) {
    u.relation_origins_.emplace(RelationRef{first.id(), id}, id);
  }
  return u;
}

UnifiedGraph UnifiedGraph::restore(
    KnowledgeGraph graph, std::vector<GraphId> members,
    std::map<EntityRef, EntityId> entity_origins,
    std::map<RelationRef, RelationId> relation_origins,
    std::vector<MergeRecord> merges) {
  for (const auto& [ref, id] : entity_origins) {
    if (!graph.has_entity(id)) {
      throw DataError(fmt::format("entity origin points at unknown id {}",
                                  id.value));
    }
  }
  for (const auto& [ref, id] : relation_origins) {
    if (!graph.has_relation(id)) {
      throw DataError(fmt::format("relation origin points at unknown id {}",
                                  id.value));
    }
  }
  UnifiedGraph u;
  u.graph_ = std::move(graph);
  u.members_ = std::move(members);
  u.entity_origins_ = std::move(entity_origins);
  u.relation_origins_ = std::move(relation_origins);
  u.merges_ = std::move(merges);
  return u;
}

EntityId UnifiedGraph::canonical_entity(const EntityRef& ref) const {
  auto it = entity_origins_.find(ref);
  if (it == entity_origins_.end()) {
    throw DataError(fmt::format("entity {} of graph {} is not integrated",
                                ref.id.value, ref.graph.value));
  }
  return it->second;
}

RelationId UnifiedGraph::canonical_relation(const RelationRef& ref) const {
  auto it = relation_origins_.find(ref);
  if (it == relation_origins_.end()) {
    throw DataError(fmt::format("relation {} of graph {} is not integrated",
                                ref.id.value, ref.graph.value));
  }
  return it->second;
}

UnifiedGraph fuse_step(const UnifiedGraph& unified,
                       const KnowledgeGraph& incoming,
                       const AlignmentSet& alignments, int iteration) {
  const auto& base = unified.graph();
  if (std::find(unified.members().begin(), unified.members().end(),
                incoming.id()) != unified.members().end()) {
    throw DataError(fmt::format("graph {} is already integrated",
                                incoming.id().value));
  }

  UnifiedGraph out;
  out.members_ = unified.members();
  out.members_.push_back(incoming.id());
  out.merges_ = unified.merges();

  DisjointSet<EntityId> entity_sets;
  DisjointSet<RelationId> relation_sets;
  std::map<EntityId, LabelSet> entities;
  std::map<RelationId, LabelSet> relations;
  const auto entity_map = fold_nodes(
      base.entities(), incoming.entities(), alignments.entities, incoming.id(),
      iteration, AlignmentKind::kEntity, entity_sets, out.merges_, entities);
  const auto relation_map =
      fold_nodes(base.relations(), incoming.relations(), alignments.relations,
                 incoming.id(), iteration, AlignmentKind::kRelation,
                 relation_sets, out.merges_, relations);

  std::vector<Triple> triples;
  triples.reserve(base.triples().size() + incoming.triples().size());
  for (const auto& t : base.triples()) {
    triples.push_back(Triple{entity_sets.find(t.head),
                             relation_sets.find(t.relation),
                             entity_sets.find(t.tail)});
  }
  for (const auto& t : incoming.triples()) {
    triples.push_back(Triple{entity_map.at(t.head),
                             relation_map.at(t.relation),
                             entity_map.at(t.tail)});
  }

  for (const auto& [ref, id] : unified.entity_origins()) {
    out.entity_origins_.emplace(ref, entity_sets.find(id));
  }
  for (const auto& [id, canonical] : entity_map) {
    out.entity_origins_.emplace(EntityRef{incoming.id(), id}, canonical);
  }
  for (const auto& [ref, id] : unified.relation_origins()) {
    out.relation_origins_.emplace(ref, relation_sets.find(id));
  }
  for (const auto& [id, canonical] : relation_map) {
    out.relation_origins_.emplace(RelationRef{incoming.id(), id}, canonical);
  }

  out.graph_ = build_graph(kUnifiedGraphId, std::string(kUnifiedLang),
                           std::move(entities), std::move(relations), triples);
  return out;
}

void write_provenance(const UnifiedGraph& unified, std::ostream& out) {
  out << "# kgfuse provenance v1\n";
  out << "# origin\t<kind>\t<canonical>\t<graph>\t<original>\n";
  out << "# merge\t<iteration>\t<kind>\t<canonical>\t<graph>\t<original>\t"
         "<confidence>\t<conflict>\n";
  for (const auto& [ref, id] : unified.entity_origins()) {
    out << fmt::format("origin\tentity\t{}\t{}\t{}\n", id.value,
                       ref.graph.value, ref.id.value);
  }
  for (const auto& [ref, id] : unified.relation_origins()) {
    out << fmt::format("origin\trelation\t{}\t{}\t{}\n", id.value,
                       ref.graph.value, ref.id.value);
  }
  for (const auto& m : unified.merges()) {
    out << fmt::format("merge\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", m.iteration,
                       to_string(m.kind), m.canonical, m.graph.value,
                       m.original, m.confidence, m.conflict ? 1 : 0);
  }
}

void save_provenance(const UnifiedGraph& unified,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  write_provenance(unified, out);
}

}  // namespace kgfuse
