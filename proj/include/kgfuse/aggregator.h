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

// Max-confidence aggregation of predictions gathered over all batch pairs,
// and the confidence threshold that decides what gets fused.

#ifndef KGFUSE_AGGREGATOR_H_
#define KGFUSE_AGGREGATOR_H_

#include <map>
#include <span>
#include <vector>

#include "kgfuse/response_parser.h"

namespace kgfuse {

template <typename Id>
struct Candidate {
  Id target;
  double confidence = 0.0;
  // Earliest batch pair that reported `target` at this confidence.
  std::size_t pair_index = 0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Ranking order: higher confidence first, then lower pair index, then
// smaller target id.
template <typename Id>
bool ranks_before(const Candidate<Id>& a, const Candidate<Id>& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.pair_index != b.pair_index) return a.pair_index < b.pair_index;
  return a.target < b.target;
}

template <typename Id>
struct AlignmentTable {
  // At most one chosen target per source.
  std::map<Id, Candidate<Id>> chosen;
  // Every distinct target reported for a source, at its best confidence, in
  // ranking order. Kept through threshold filtering for Hits@k.
  std::map<Id, std::vector<Candidate<Id>>> ranked;

  friend bool operator==(const AlignmentTable&,
                         const AlignmentTable&) = default;
};

struct AlignmentSet {
  AlignmentTable<EntityId> entities;
  AlignmentTable<RelationId> relations;

  friend bool operator==(const AlignmentSet&, const AlignmentSet&) = default;
};

struct AggregateOptions {
  // Greedy one-to-one assignment: walk all candidates in ranking order and
  // skip sources or targets already used. Off by default, in which case each
  // source independently takes its top candidate.
  bool bijective = false;
};

AlignmentTable<EntityId> aggregate_entities(
    std::span<const EntityPrediction> predictions,
    const AggregateOptions& options = {});
AlignmentTable<RelationId> aggregate_relations(
    std::span<const RelationPrediction> predictions,
    const AggregateOptions& options = {});

AlignmentSet aggregate(std::span<const EntityPrediction> entities,
                       std::span<const RelationPrediction> relations,
                       const AggregateOptions& options = {});

// Drops chosen alignments with confidence < tau; a confidence equal to tau
// is kept. Ranked candidate lists are left untouched. Throws
// std::invalid_argument unless 0 <= tau <= 1.
AlignmentSet filter_threshold(const AlignmentSet& set, double tau);

template <typename Id>
AlignmentTable<Id> filter_threshold(const AlignmentTable<Id>& table,
                                    double tau);

}  // namespace kgfuse

#endif  // KGFUSE_AGGREGATOR_H_
