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

#include "kgfuse/oracle_backend.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "kgfuse/disjoint_set.h"
#include "kgfuse/errors.h"
#include "kgfuse/response_cache.h"

namespace kgfuse {
namespace {

using json = nlohmann::json;

template <typename Ref>
std::map<Ref, std::uint64_t> cluster_numbers(
    const std::vector<std::pair<Ref, Ref>>& pairs) {
  DisjointSet<Ref> sets;
  for (const auto& [a, b] : pairs) sets.unite(a, b);
  std::map<Ref, std::uint64_t> root_numbers;
  std::map<Ref, std::uint64_t> out;
  for (const auto& [ref, parent] : sets.parents()) {
    const Ref root = sets.find(ref);
    auto [it, inserted] = root_numbers.try_emplace(root, root_numbers.size());
    out[ref] = it->second;
  }
  return out;
}

double draw_confidence(std::mt19937_64& rng,
                       const ConfidenceDistribution& dist) {
  double x = dist.mean;
  if (dist.sd > 0.0) {
    std::normal_distribution<double> normal(dist.mean, dist.sd);
    x = normal(rng);
  }
  x = std::clamp(x, 0.0, 1.0);
  return std::round(x * 1000.0) / 1000.0;
}

std::string join_words(std::span<const std::string_view> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += words[i];
  }
  return out;
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t start = 0;
  while (true) {
    auto sp = line.find(' ', start);
    if (sp == std::string_view::npos) {
      words.push_back(line.substr(start));
      return words;
    }
    words.push_back(line.substr(start, sp - start));
    start = sp + 1;
  }
}

template <typename Id, typename Lookup>
std::optional<ScopedRef<Id>> first_match(std::span<const GraphId> graphs,
                                         Lookup&& lookup) {
  for (GraphId g : graphs) {
    const auto& ids = lookup(g);
    if (!ids.empty()) return ScopedRef<Id>{g, *ids.begin()};
  }
  return std::nullopt;
}

}  // namespace

void validate(const OracleConfig& config) {
  if (!(config.fp_rate >= 0.0 && config.fp_rate <= 1.0)) {
    throw ConfigError("fp_rate must lie in [0, 1]");
  }
  if (config.tp_confidence.sd < 0.0 || config.fp_confidence.sd < 0.0) {
    throw ConfigError("confidence standard deviations must be >= 0");
  }
}

std::vector<std::pair<EntityRef, EntityRef>> gold_entity_pairs(
    GraphId source, GraphId target, const std::map<EntityId, EntityId>& pairs) {
  std::vector<std::pair<EntityRef, EntityRef>> out;
  out.reserve(pairs.size());
  for (const auto& [s, t] : pairs) {
    out.emplace_back(EntityRef{source, s}, EntityRef{target, t});
  }
  return out;
}

std::vector<std::pair<RelationRef, RelationRef>> gold_relation_pairs(
    GraphId source, GraphId target,
    const std::map<RelationId, RelationId>& pairs) {
  std::vector<std::pair<RelationRef, RelationRef>> out;
  out.reserve(pairs.size());
  for (const auto& [s, t] : pairs) {
    out.emplace_back(RelationRef{source, s}, RelationRef{target, t});
  }
  return out;
}

OracleBackend::OracleBackend(OracleConfig config,
                             std::vector<KnowledgeGraph> graphs)
    : config_(std::move(config)) {
  validate(config_);
  for (const auto& g : graphs) {
    if (!entries_.emplace(g.id(), GraphEntry{build_label_index(g)})
             .second) {
      throw ConfigError(
          fmt::format("oracle: duplicate graph id {}", g.id().value));
    }
  }
  entity_clusters_ = cluster_numbers(config_.entity_pairs);
  relation_clusters_ = cluster_numbers(config_.relation_pairs);
}

std::optional<OracleBackend::LineRefs> OracleBackend::split_line(
    std::string_view line, std::span<const GraphId> graphs) const {
  const auto words = split_spaces(line);
  const std::size_t n = words.size();
  const std::span<const std::string_view> all(words);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto head_text = join_words(all.subspan(0, i));
    auto head = first_match<EntityId>(graphs, [&](GraphId g) -> const auto& {
      return entries_.at(g).index.lookup_entity(head_text);
    });
    if (!head) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto rel_text = join_words(all.subspan(i, j - i));
      auto rel = first_match<RelationId>(graphs, [&](GraphId g) -> const auto& {
        return entries_.at(g).index.lookup_relation(rel_text);
      });
      if (!rel) continue;
      const auto tail_text = join_words(all.subspan(j));
      auto tail = first_match<EntityId>(graphs, [&](GraphId g) -> const auto& {
        return entries_.at(g).index.lookup_entity(tail_text);
      });
      if (!tail) continue;
      return LineRefs{*head, *rel, *tail, head_text, rel_text, tail_text};
    }
  }
  return std::nullopt;
}

RawResponse OracleBackend::submit(const Prompt& prompt) {
  const GraphId target_graph = prompt.meta.target_graph;
  if (!entries_.contains(target_graph)) {
    throw BackendError(
        fmt::format("oracle: unknown target graph {}", target_graph.value),
        /*fatal=*/true);
  }
  std::vector<GraphId> source_graphs;
  for (GraphId g : prompt.meta.source_graphs) {
    if (entries_.contains(g)) source_graphs.push_back(g);
  }
  if (prompt.meta.source_graphs.empty()) {
    for (const auto& [g, entry] : entries_) {
      if (g != target_graph) source_graphs.push_back(g);
    }
  }
  const std::array<GraphId, 1> target_span{target_graph};

  struct Seen {
    std::vector<std::pair<EntityRef, std::string>> entities;
    std::vector<std::pair<RelationRef, std::string>> relations;
    std::set<EntityRef> entity_set;
    std::set<RelationRef> relation_set;

    void add(const LineRefs& refs) {
      if (entity_set.insert(refs.head).second) {
        entities.emplace_back(refs.head, refs.head_text);
      }
      if (relation_set.insert(refs.relation).second) {
        relations.emplace_back(refs.relation, refs.relation_text);
      }
      if (entity_set.insert(refs.tail).second) {
        entities.emplace_back(refs.tail, refs.tail_text);
      }
    }
  };

  const auto blocks = split_payload(prompt.user);
  Seen source;
  for (auto line : blocks.source_lines) {
    if (auto refs = split_line(line, source_graphs)) source.add(*refs);
  }
  Seen target;
  for (auto line : blocks.target_lines) {
    if (auto refs = split_line(line, target_span)) target.add(*refs);
  }

  const auto digest = sha256_hex(prompt.system + '\x1f' + prompt.user);
  std::seed_seq seq{static_cast<std::uint32_t>(config_.seed),
                    static_cast<std::uint32_t>(config_.seed >> 32),
                    static_cast<std::uint32_t>(
                        std::stoul(digest.substr(0, 8), nullptr, 16)),
                    static_cast<std::uint32_t>(
                        std::stoul(digest.substr(8, 8), nullptr, 16))};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  json entity_items = json::array();
  for (const auto& [ref, text] : source.entities) {
    auto cluster = entity_clusters_.find(ref);
    std::vector<const std::pair<EntityRef, std::string>*> same;
    std::vector<const std::pair<EntityRef, std::string>*> other;
    for (const auto& candidate : target.entities) {
      auto tc = entity_clusters_.find(candidate.first);
      const bool match = cluster != entity_clusters_.end() &&
                         tc != entity_clusters_.end() &&
                         tc->second == cluster->second;
      (match ? same : other).push_back(&candidate);
    }
    if (unit(rng) < config_.fp_rate) {
      if (other.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, other.size() - 1);
      const auto* wrong = other[pick(rng)];
      entity_items.push_back(
          {{"source_label", text},
           {"target_label", wrong->second},
           {"confidence", draw_confidence(rng, config_.fp_confidence)}});
      continue;
    }
    for (const auto* right : same) {
      entity_items.push_back(
          {{"source_label", text},
           {"target_label", right->second},
           {"confidence", draw_confidence(rng, config_.tp_confidence)}});
    }
  }

  json relation_items = json::array();
  for (const auto& [ref, text] : source.relations) {
    auto cluster = relation_clusters_.find(ref);
    if (cluster == relation_clusters_.end()) continue;
    for (const auto& [tref, ttext] : target.relations) {
      auto tc = relation_clusters_.find(tref);
      if (tc != relation_clusters_.end() && tc->second == cluster->second) {
        relation_items.push_back(
            {{"source_label", text},
             {"target_label", ttext},
             {"confidence", draw_confidence(rng, config_.tp_confidence)}});
      }
    }
  }

  RawResponse response;
  response.text = json{{"entity_alignments", std::move(entity_items)},
                       {"relation_alignments", std::move(relation_items)}}
                      .dump();
  return response;
}

}  // namespace kgfuse
