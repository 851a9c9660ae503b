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

#include "kgfuse/aggregator.h"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace kgfuse {
namespace {

template <typename Id>
AlignmentTable<Id> aggregate_table(std::span<const Prediction<Id>> predictions,
                                   const AggregateOptions& options) {
  // Best (confidence, pair) per (source, target).
  std::map<Id, std::map<Id, Candidate<Id>>> best;
  for (const auto& p : predictions) {
    Candidate<Id> c{p.target, p.confidence, p.pair_index};
    auto [it, inserted] = best[p.source].try_emplace(p.target, c);
    if (!inserted && ranks_before(c, it->second)) it->second = c;
  }

  AlignmentTable<Id> table;
  for (auto& [source, by_target] : best) {
    auto& list = table.ranked[source];
    list.reserve(by_target.size());
    for (auto& [target, c] : by_target) list.push_back(c);
    std::sort(list.begin(), list.end(), ranks_before<Id>);
  }

  if (!options.bijective) {
    for (const auto& [source, list] : table.ranked) {
      table.chosen.emplace(source, list.front());
    }
    return table;
  }

  struct Entry {
    Id source;
    Candidate<Id> candidate;
  };
  std::vector<Entry> all;
  for (const auto& [source, list] : table.ranked) {
    for (const auto& c : list) all.push_back(Entry{source, c});
  }
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    if (ranks_before(a.candidate, b.candidate)) return true;
    if (ranks_before(b.candidate, a.candidate)) return false;
    return a.source < b.source;
  });
  std::set<Id> used_targets;
  for (const auto& e : all) {
    if (table.chosen.contains(e.source) ||
        used_targets.contains(e.candidate.target)) {
      continue;
    }
    table.chosen.emplace(e.source, e.candidate);
    used_targets.insert(e.candidate.target);
  }
  return table;
}

void check_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("tau must lie in [0, 1]");
  }
}

}  // namespace

AlignmentTable<EntityId> aggregate_entities(
    std::span<const EntityPrediction> predictions,
    const AggregateOptions& options) {
  return aggregate_table(predictions, options);
}

AlignmentTable<RelationId> aggregate_relations(
    std::span<const RelationPrediction> predictions,
    const AggregateOptions& options) {
  return aggregate_table(predictions, options);
}

AlignmentSet aggregate(std::span<const EntityPrediction> entities,
                       std::span<const RelationPrediction> relations,
                       const AggregateOptions& options) {
  return AlignmentSet{aggregate_entities(entities, options),
                      aggregate_relations(relations, options)};
}

template <typename Id>
AlignmentTable<Id> filter_threshold(const AlignmentTable<Id>& table,
                                    double tau) {
  check_tau(tau);
  AlignmentTable<Id> out;
  out.ranked = table.ranked;
  for (const auto& [source, c] : table.chosen) {
    if (c.confidence >= tau) out.chosen.emplace(source, c);
  }
  return out;
}

template AlignmentTable<EntityId> filter_threshold(
    const AlignmentTable<EntityId>&, double);
template AlignmentTable<RelationId> filter_threshold(
    const AlignmentTable<RelationId>&, double);

AlignmentSet filter_threshold(const AlignmentSet& set, double tau) {
  return AlignmentSet{filter_threshold(set.entities, tau),
                      filter_threshold(set.relations, tau)};
}

}  // namespace kgfuse
