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

#include "kgfuse/response_parser.h"

#include <algorithm>
#include <cctype>
#include <optional>

#include <json.hpp>

namespace kgfuse {
namespace {

using json = nlohmann::json;

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

// Position of the first `open` whose next non-space character is one of
// `next`.
std::size_t find_opening(std::string_view text, char open,
                         std::string_view next) {
  for (std::size_t i = text.find(open); i != std::string_view::npos;
       i = text.find(open, i + 1)) {
    std::size_t j = i + 1;
    while (j < text.size() && is_space(text[j])) ++j;
    if (j < text.size() && next.find(text[j]) != std::string_view::npos) {
      return i;
    }
  }
  return std::string_view::npos;
}

// The first '{' or '[' that looks like the start of a JSON object or array
// of objects, then any '{', then any '['.
std::size_t find_payload_start(std::string_view text) {
  const auto object = find_opening(text, '{', "\"}");
  const auto array = find_opening(text, '[', "{");
  if (object != std::string_view::npos || array != std::string_view::npos) {
    return std::min(object, array);
  }
  if (auto i = text.find('{'); i != std::string_view::npos) return i;
  return text.find('[');
}

std::optional<AlignmentKind> kind_for_key(std::string_view key) {
  std::string lower(key);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "entity_alignments") return AlignmentKind::kEntity;
  if (lower == "relation_alignments") return AlignmentKind::kRelation;
  return std::nullopt;
}

bool has_text(const std::string& s) {
  return std::any_of(s.begin(), s.end(),
                     [](char c) { return !is_space(c); });
}

// Decodes one complete item object. Returns nullopt when it is not valid
// JSON or a required field is missing.
std::optional<ParsedItem> decode_item(std::string_view span, AlignmentKind kind,
                                      ParseDiagnostics& diag) {
  auto obj = json::parse(span, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) return std::nullopt;

  auto source = obj.find("source_label");
  auto target = obj.find("target_label");
  auto conf = obj.find("confidence");
  if (source == obj.end() || target == obj.end() || conf == obj.end() ||
      !source->is_string() || !target->is_string()) {
    return std::nullopt;
  }
  double confidence = 0.0;
  if (conf->is_number()) {
    confidence = conf->get<double>();
  } else if (conf->is_string()) {
    try {
      std::size_t used = 0;
      const auto s = conf->get<std::string>();
      confidence = std::stod(s, &used);
      if (used != s.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }
  if (confidence != confidence) return std::nullopt;  // NaN

  ParsedItem item;
  item.kind = kind;
  item.source_label = source->get<std::string>();
  item.target_label = target->get<std::string>();
  if (!has_text(item.source_label) || !has_text(item.target_label)) {
    return std::nullopt;
  }
  const double clipped = std::clamp(confidence, 0.0, 1.0);
  if (clipped != confidence) ++diag.clipped_confidences;
  item.confidence = clipped;
  return item;
}

struct Frame {
  char open;
  // Set for arrays whose elements are alignment items.
  std::optional<AlignmentKind> items;
};

}  // namespace

std::string_view to_string(AlignmentKind kind) {
  return kind == AlignmentKind::kEntity ? "entity" : "relation";
}

ParseResult salvage_parse(std::string_view text) {
  ParseResult result;
  auto& diag = result.diagnostics;

  const std::size_t start = find_payload_start(text);
  if (start == std::string_view::npos) return result;
  diag.payload_found = true;

  std::vector<Frame> stack;
  bool in_string = false;
  bool escaped = false;
  std::size_t string_start = 0;
  // Last string literal seen directly inside the top-level object.
  std::string_view last_top_string;
  // Start of the item object being read, if any.
  std::optional<std::size_t> item_start;
  std::optional<AlignmentKind> item_kind;

  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
        if (stack.size() == 1 && stack.back().open == '{') {
          last_top_string = text.substr(string_start, i - string_start);
        }
      }
      continue;
    }

    switch (c) {
      case '"':
        in_string = true;
        string_start = i + 1;
        break;
      case '{':
      case '[': {
        Frame frame{c, std::nullopt};
        if (c == '[') {
          if (stack.empty()) {
            frame.items = AlignmentKind::kEntity;
          } else if (stack.size() == 1 && stack.back().open == '{') {
            frame.items = kind_for_key(last_top_string);
          }
        } else if (!stack.empty() && stack.back().items && !item_start) {
          item_start = i;
          item_kind = stack.back().items;
        }
        stack.push_back(frame);
        break;
      }
      case '}':
      case ']': {
        if (stack.empty()) break;
        stack.pop_back();
        if (item_start && !stack.empty() && stack.back().items) {
          auto item = decode_item(text.substr(*item_start, i + 1 - *item_start),
                                  *item_kind, diag);
          if (item) {
            result.items.push_back(std::move(*item));
          } else {
            ++diag.malformed_items;
          }
          item_start.reset();
        }
        if (stack.empty()) return result;
        break;
      }
      default:
        break;
    }
  }

  diag.truncated = true;
  if (item_start) ++diag.dropped_fragments;
  return result;
}

ResolveResult resolve(const std::vector<ParsedItem>& items,
                      const LabelIndex& source_index,
                      const LabelIndex& target_index, std::size_t pair_index) {
  ResolveResult out;
  for (const auto& item : items) {
    if (item.kind == AlignmentKind::kEntity) {
      const auto& sources = source_index.lookup_entity(item.source_label);
      const auto& targets = target_index.lookup_entity(item.target_label);
      if (sources.empty() || targets.empty()) {
        ++out.dropped;
        continue;
      }
      if (sources.size() > 1 || targets.size() > 1) ++out.ambiguous;
      out.entities.push_back(EntityPrediction{
          *sources.begin(), *targets.begin(), item.confidence, pair_index});
    } else {
      const auto& sources = source_index.lookup_relation(item.source_label);
      const auto& targets = target_index.lookup_relation(item.target_label);
      if (sources.empty() || targets.empty()) {
        ++out.dropped;
        continue;
      }
      if (sources.size() > 1 || targets.size() > 1) ++out.ambiguous;
      out.relations.push_back(RelationPrediction{
          *sources.begin(), *targets.begin(), item.confidence, pair_index});
    }
  }
  return out;
}

}  // namespace kgfuse
