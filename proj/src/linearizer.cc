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

#include "kgfuse/linearizer.h"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "kgfuse/errors.h"
#include "kgfuse/prompt_assets.h"
#include "kgfuse/text_util.h"

namespace kgfuse {
namespace {

void append_label(std::string& out, std::string_view text) {
  for (char c : text) {
    out += (c == '\n' || c == '\r' || c == '\t') ? ' ' : c;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_tau(double tau) { return fmt::format("{:.2f}", tau); }

}  // namespace

std::string linearize_triple(const Triple& triple,
                             const KnowledgeGraph& graph) {
  std::string line;
  append_label(line, graph.primary_entity_label(triple.head).text);
  line += ' ';
  append_label(line, graph.primary_relation_label(triple.relation).text);
  line += ' ';
  append_label(line, graph.primary_entity_label(triple.tail).text);
  return line;
}

std::string linearize_batch(const Batch& batch, const KnowledgeGraph& graph) {
  std::string out;
  out.reserve(batch.linearized_size);
  for (std::size_t i = 0; i < batch.triples.size(); ++i) {
    if (i > 0) out += '\n';
    out += linearize_triple(batch.triples[i], graph);
  }
  return out;
}

const PromptTemplate& default_prompt_template() {
  static const PromptTemplate kDefault{std::string(kSystemPromptAsset),
                                       std::string(kUserPromptAsset)};
  return kDefault;
}

void validate_prompt_template(const PromptTemplate& tmpl) {
  for (std::string_view p : {"{{tau}}", "{{output_schema}}"}) {
    if (tmpl.system.find(p) == std::string::npos) {
      throw ConfigError(
          fmt::format("system prompt template lacks placeholder {}", p));
    }
  }
  for (std::string_view p : {"{{source_block}}", "{{target_block}}"}) {
    if (tmpl.user.find(p) == std::string::npos) {
      throw ConfigError(
          fmt::format("user prompt template lacks placeholder {}", p));
    }
  }
}

PromptTemplate load_prompt_template(const std::filesystem::path& directory) {
  PromptTemplate tmpl{read_file(directory / "system.txt"),
                      read_file(directory / "user.txt")};
  validate_prompt_template(tmpl);
  return tmpl;
}

Prompt build_prompt(const Batch& source_batch, const KnowledgeGraph& source,
                    const Batch& target_batch, const KnowledgeGraph& target,
                    const PromptTemplate& tmpl, double tau, PromptMeta meta) {
  Prompt prompt;
  prompt.system = replace_all(tmpl.system, "{{output_schema}}", kOutputSchema);
  prompt.system = replace_all(std::move(prompt.system), "{{tau}}",
                              format_tau(tau));

  // Counts first: the blocks may legitimately contain placeholder-like text.
  std::string user = replace_all(tmpl.user, "{{source_count}}",
                                 std::to_string(source_batch.triples.size()));
  user = replace_all(std::move(user), "{{target_count}}",
                     std::to_string(target_batch.triples.size()));
  const auto target_pos = user.find("{{target_block}}");
  const auto source_pos = user.find("{{source_block}}");
  if (source_pos == std::string::npos || target_pos == std::string::npos) {
    throw ConfigError("user prompt template lacks a block placeholder");
  }
  // Substitute the later placeholder first so the earlier offset stays valid.
  const auto source_text = linearize_batch(source_batch, source);
  const auto target_text = linearize_batch(target_batch, target);
  constexpr std::size_t kPlaceholderLen = 16;  // "{{source_block}}"
  if (target_pos > source_pos) {
    user.replace(target_pos, kPlaceholderLen, target_text);
    user.replace(source_pos, kPlaceholderLen, source_text);
  } else {
    user.replace(source_pos, kPlaceholderLen, source_text);
    user.replace(target_pos, kPlaceholderLen, target_text);
  }
  prompt.user = std::move(user);
  prompt.meta = std::move(meta);
  return prompt;
}

std::size_t prompt_overhead(const PromptTemplate& tmpl, double tau) {
  Batch empty;
  empty.graph = GraphId{1};
  Batch other;
  other.graph = GraphId{2};
  KnowledgeGraph none;
  auto p = build_prompt(empty, none, other, none, tmpl, tau);
  return p.system.size() + p.user.size();
}

PayloadBlocks split_payload(std::string_view user) {
  PayloadBlocks blocks;
  enum class Section { kNone, kSource, kTarget } section = Section::kNone;
  for (auto line : split_lines(user)) {
    if (line == kSourceHeader) {
      section = Section::kSource;
      continue;
    }
    if (line == kTargetHeader) {
      section = Section::kTarget;
      continue;
    }
    if (line.empty()) continue;
    if (section == Section::kSource) blocks.source_lines.push_back(line);
    if (section == Section::kTarget) blocks.target_lines.push_back(line);
  }
  return blocks;
}

}  // namespace kgfuse
