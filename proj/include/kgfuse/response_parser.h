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

// Recovery of alignment items from model output that may be wrapped in prose
// or markdown fences, truncated, or locally malformed; and resolution of the
// recovered labels to graph ids.

#ifndef KGFUSE_RESPONSE_PARSER_H_
#define KGFUSE_RESPONSE_PARSER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kgfuse/kg_model.h"

namespace kgfuse {

enum class AlignmentKind { kEntity, kRelation };

std::string_view to_string(AlignmentKind kind);

struct ParsedItem {
  AlignmentKind kind = AlignmentKind::kEntity;
  std::string source_label;
  std::string target_label;
  // Clipped to [0, 1].
  double confidence = 0.0;

  friend bool operator==(const ParsedItem&, const ParsedItem&) = default;
};

struct ParseDiagnostics {
  bool payload_found = false;
  // The payload ended before its top-level value closed.
  bool truncated = false;
  // Item objects cut off by the end of input.
  std::size_t dropped_fragments = 0;
  // Complete item objects that were not valid JSON or lacked a field.
  std::size_t malformed_items = 0;
  // Confidences outside [0, 1] that were clipped.
  std::size_t clipped_confidences = 0;
};

struct ParseResult {
  std::vector<ParsedItem> items;
  ParseDiagnostics diagnostics;
};

// Scans for the first '{' that opens an object or '[' that opens an array
// of objects (falling back to any bracket), then walks the payload tracking
// nesting depth and string literals. Every item object that closes inside an
// "entity_alignments" or "relation_alignments" array is decoded on its own;
// a bare top-level array is read as entity alignments. Anything after the
// last complete item is discarded. Never throws.
ParseResult salvage_parse(std::string_view raw_text);

template <typename Id>
struct Prediction {
  Id source;
  Id target;
  double confidence = 0.0;
  std::size_t pair_index = 0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

using EntityPrediction = Prediction<EntityId>;
using RelationPrediction = Prediction<RelationId>;

struct ResolveResult {
  std::vector<EntityPrediction> entities;
  std::vector<RelationPrediction> relations;
  // Items whose source or target label matched nothing.
  std::size_t dropped = 0;
  // Items where a label matched several ids; the smallest id was taken.
  std::size_t ambiguous = 0;
};

ResolveResult resolve(const std::vector<ParsedItem>& items,
                      const LabelIndex& source_index,
                      const LabelIndex& target_index, std::size_t pair_index);

}  // namespace kgfuse

#endif  // KGFUSE_RESPONSE_PARSER_H_
