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

#include "kgfuse/kg_model.h"

#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <fmt/format.h>

#include "kgfuse/errors.h"

namespace kgfuse {
namespace {

void validate_labels(const LabelSet& labels, std::string_view what,
                     std::uint32_t id) {
  if (labels.empty()) {
    throw DataError(fmt::format("{} {} has no labels", what, id));
  }
  for (const auto& label : labels) {
    if (label.lang.empty()) {
      throw DataError(
          fmt::format("{} {} has a label without language tag", what, id));
    }
    if (normalize_label(label.text).empty()) {
      throw DataError(fmt::format("{} {} has an empty label", what, id));
    }
  }
}

}  // namespace

std::string normalize_label(std::string_view text) {
  icu::UnicodeString folded =
      icu::UnicodeString::fromUTF8(
          icu::StringPiece(text.data(), static_cast<int32_t>(text.size())))
          .foldCase();

  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < folded.length();) {
    UChar32 c = folded.char32At(i);
    i += U16_LENGTH(c);
    if (c == '_' || u_isUWhiteSpace(c)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (pending_space) {
      out.append(static_cast<UChar>(' '));
      pending_space = false;
    }
    out.append(c);
  }
  std::string result;
  out.toUTF8String(result);
  return result;
}

const LabelSet& KnowledgeGraph::entity_labels(EntityId id) const {
  auto it = entities_.find(id);
  if (it == entities_.end()) {
    throw DataError(fmt::format("graph {}: unknown entity {}", id_.value,
                                id.value));
  }
  return it->second;
}

const LabelSet& KnowledgeGraph::relation_labels(RelationId id) const {
  auto it = relations_.find(id);
  if (it == relations_.end()) {
    throw DataError(fmt::format("graph {}: unknown relation {}", id_.value,
                                id.value));
  }
  return it->second;
}

KnowledgeGraph build_graph(GraphId id, std::string lang,
                           std::map<EntityId, LabelSet> entities,
                           std::map<RelationId, LabelSet> relations,
                           std::span<const Triple> triples) {
  for (const auto& [eid, labels] : entities) {
    validate_labels(labels, "entity", eid.value);
  }
  for (const auto& [rid, labels] : relations) {
    validate_labels(labels, "relation", rid.value);
  }

  KnowledgeGraph g;
  g.id_ = id;
  g.lang_ = std::move(lang);
  for (const auto& t : triples) {
    if (!entities.contains(t.head) || !entities.contains(t.tail) ||
        !relations.contains(t.relation)) {
      throw DataError(fmt::format("graph {}: triple {} references an unknown id",
                                  id.value, to_string(t)));
    }
    g.triples_.insert(t);
  }
  g.entities_ = std::move(entities);
  g.relations_ = std::move(relations);
  return g;
}

const std::set<EntityId>& LabelIndex::lookup_entity(
    std::string_view text) const {
  static const std::set<EntityId> kEmpty;
  auto it = entities_.find(normalize_label(text));
  return it == entities_.end() ? kEmpty : it->second;
}

const std::set<RelationId>& LabelIndex::lookup_relation(
    std::string_view text) const {
  static const std::set<RelationId> kEmpty;
  auto it = relations_.find(normalize_label(text));
  return it == relations_.end() ? kEmpty : it->second;
}

LabelIndex build_label_index(const KnowledgeGraph& graph) {
  LabelIndex index;
  for (const auto& [id, labels] : graph.entities()) {
    for (const auto& label : labels) {
      index.entities_[normalize_label(label.text)].insert(id);
    }
  }
  for (const auto& [id, labels] : graph.relations()) {
    for (const auto& label : labels) {
      index.relations_[normalize_label(label.text)].insert(id);
    }
  }
  return index;
}

std::string to_string(const Triple& t) {
  return fmt::format("({}, {}, {})", t.head.value, t.relation.value,
                     t.tail.value);
}

}  // namespace kgfuse
