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

// Turns batches into text and assembles the two-part alignment prompt.
//
// A triple is rendered as "<head> <relation> <tail>" using the primary
// (first) label of each id. Control characters inside labels are rendered as
// spaces so that every triple occupies exactly one line.
//
// Prompt templates are plain text with these placeholders:
//   system: {{tau}} {{output_schema}}
//   user:   {{source_block}} {{target_block}} {{source_count}}
//           {{target_count}}
// The defaults are compiled in from assets/prompts/.

#ifndef KGFUSE_LINEARIZER_H_
#define KGFUSE_LINEARIZER_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kgfuse/kg_model.h"
#include "kgfuse/partitioner.h"

namespace kgfuse {

inline constexpr std::string_view kSourceHeader = "SOURCE GRAPH TRIPLES:";
inline constexpr std::string_view kTargetHeader = "TARGET GRAPH TRIPLES:";

// The response contract stated in every system prompt.
inline constexpr std::string_view kOutputSchema =
    R"({"entity_alignments": [{"source_label": "<label from SOURCE>", )"
    R"("target_label": "<label from TARGET>", "confidence": <number in [0, 1]>}], )"
    R"("relation_alignments": [{"source_label": "<label from SOURCE>", )"
    R"("target_label": "<label from TARGET>", "confidence": <number in [0, 1]>}]})";

struct PromptTemplate {
  std::string system;
  std::string user;
};

// Everything the backends may want to know about a task besides the text.
// Nothing here is sent to a hosted model.
struct PromptMeta {
  std::size_t pair_index = 0;
  int iteration = 0;
  // Input graphs folded into the source side, in integration order.
  std::vector<GraphId> source_graphs;
  GraphId target_graph;
  std::string model_name;
  double temperature = 0.0;
};

struct Prompt {
  std::string system;
  std::string user;
  PromptMeta meta;
};

std::string linearize_triple(const Triple& triple, const KnowledgeGraph& graph);

// One line per triple in batch order, joined by '\n' without a trailing
// newline. An empty batch gives an empty string.
std::string linearize_batch(const Batch& batch, const KnowledgeGraph& graph);

const PromptTemplate& default_prompt_template();

// Reads system.txt and user.txt from `directory`. Throws ConfigError if a
// file is missing or a required placeholder is absent.
PromptTemplate load_prompt_template(const std::filesystem::path& directory);
void validate_prompt_template(const PromptTemplate& tmpl);

Prompt build_prompt(const Batch& source_batch, const KnowledgeGraph& source,
                    const Batch& target_batch, const KnowledgeGraph& target,
                    const PromptTemplate& tmpl, double tau,
                    PromptMeta meta = {});

// Characters a prompt adds on top of the two linearized blocks.
std::size_t prompt_overhead(const PromptTemplate& tmpl, double tau);

// Source and target block lines recovered from a user payload built with a
// template that keeps the two section headers.
struct PayloadBlocks {
  std::vector<std::string_view> source_lines;
  std::vector<std::string_view> target_lines;
};
PayloadBlocks split_payload(std::string_view user);

}  // namespace kgfuse

#endif  // KGFUSE_LINEARIZER_H_
