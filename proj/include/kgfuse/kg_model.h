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

// Core knowledge graph model: a language-tagged graph of entities, relation
// types and (head, relation, tail) triples, plus a normalized label index.

#ifndef KGFUSE_KG_MODEL_H_
#define KGFUSE_KG_MODEL_H_

#include <compare>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgfuse/ids.h"

namespace kgfuse {

struct Label {
  std::string text;
  std::string lang;

  auto operator<=>(const Label&) const = default;
};

// Ordered; the first label is the primary label used for linearization.
using LabelSet = std::vector<Label>;

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  auto operator<=>(const Triple&) const = default;
};

// Casefold, map '_' to space, trim, and collapse runs of whitespace into a
// single space. Idempotent.
std::string normalize_label(std::string_view text);

// Immutable after construction; obtain instances through build_graph().
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  GraphId id() const { return id_; }
  const std::string& lang() const { return lang_; }

  const std::map<EntityId, LabelSet>& entities() const { return entities_; }
  const std::map<RelationId, LabelSet>& relations() const {
    return relations_;
  }
  const std::set<Triple>& triples() const { return triples_; }

  bool has_entity(EntityId id) const { return entities_.contains(id); }
  bool has_relation(RelationId id) const { return relations_.contains(id); }

  // Throw DataError for unknown ids.
  const LabelSet& entity_labels(EntityId id) const;
  const LabelSet& relation_labels(RelationId id) const;
  const Label& primary_entity_label(EntityId id) const {
    return entity_labels(id).front();
  }
  const Label& primary_relation_label(RelationId id) const {
    return relation_labels(id).front();
  }

  friend bool operator==(const KnowledgeGraph&,
                         const KnowledgeGraph&) = default;

 private:
  friend KnowledgeGraph build_graph(GraphId, std::string,
                                    std::map<EntityId, LabelSet>,
                                    std::map<RelationId, LabelSet>,
                                    std::span<const Triple>);

  GraphId id_;
  std::string lang_;
  std::map<EntityId, LabelSet> entities_;
  std::map<RelationId, LabelSet> relations_;
  std::set<Triple> triples_;
};

// Validates and assembles a graph. Duplicate triples collapse. Throws
// DataError for dangling triple ids, entities or relations without labels,
// and labels that are empty after normalization or lack a language tag.
KnowledgeGraph build_graph(GraphId id, std::string lang,
                           std::map<EntityId, LabelSet> entities,
                           std::map<RelationId, LabelSet> relations,
                           std::span<const Triple> triples);

// Case-insensitive label lookup over one graph. Labels shared by several
// ids map to all of them.
class LabelIndex {
 public:
  const std::set<EntityId>& lookup_entity(std::string_view text) const;
  const std::set<RelationId>& lookup_relation(std::string_view text) const;

  std::size_t entity_key_count() const { return entities_.size(); }
  std::size_t relation_key_count() const { return relations_.size(); }

 private:
  friend LabelIndex build_label_index(const KnowledgeGraph& graph);

  std::unordered_map<std::string, std::set<EntityId>> entities_;
  std::unordered_map<std::string, std::set<RelationId>> relations_;
};

LabelIndex build_label_index(const KnowledgeGraph& graph);

std::string to_string(const Triple& t);

}  // namespace kgfuse

#endif  // KGFUSE_KG_MODEL_H_
