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

#include "kgfuse/partitioner.h"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "kgfuse/linearizer.h"

namespace kgfuse {
namespace {

struct HeadGroup {
  EntityId head;
  std::vector<Triple> triples;
  std::size_t size = 0;
};

}  // namespace

std::vector<std::vector<std::size_t>> pack_first_fit(
    std::span<const std::size_t> sizes, std::size_t capacity) {
  std::vector<std::vector<std::size_t>> bins;
  std::vector<std::size_t> loads;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    std::size_t bin = 0;
    while (bin < bins.size() && loads[bin] + sizes[i] > capacity) ++bin;
    if (bin == bins.size()) {
      bins.emplace_back();
      loads.push_back(0);
    }
    bins[bin].push_back(i);
    loads[bin] += sizes[i];
  }
  return bins;
}

std::vector<Batch> partition(const KnowledgeGraph& graph,
                             const PartitionConfig& config) {
  if (config.char_budget == 0) {
    throw std::invalid_argument("partition: char_budget must be positive");
  }

  // The triple set is ordered by (head, relation, tail), so each group comes
  // out contiguous and internally sorted.
  std::vector<HeadGroup> groups;
  for (const auto& t : graph.triples()) {
    if (groups.empty() || groups.back().head != t.head) {
      groups.push_back(HeadGroup{t.head, {}, 0});
    }
    groups.back().triples.push_back(t);
    groups.back().size += linearize_triple(t, graph).size() + 1;
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const HeadGroup& a, const HeadGroup& b) {
                     if (a.size != b.size) return a.size > b.size;
                     return a.head < b.head;
                   });

  std::vector<std::size_t> sizes;
  sizes.reserve(groups.size());
  for (const auto& g : groups) sizes.push_back(g.size);

  std::vector<Batch> batches;
  for (const auto& bin : pack_first_fit(sizes, config.char_budget)) {
    Batch batch;
    batch.batch_id = batches.size();
    batch.graph = graph.id();
    for (std::size_t gi : bin) {
      const auto& g = groups[gi];
      batch.head_entities.insert(g.head);
      batch.triples.insert(batch.triples.end(), g.triples.begin(),
                           g.triples.end());
      batch.linearized_size += g.size;
    }
    batch.oversized = batch.linearized_size > config.char_budget;
    batches.push_back(std::move(batch));
  }
  return batches;
}

std::vector<BatchPair> pair_batches(std::span<const Batch> source,
                                    std::span<const Batch> target) {
  std::vector<BatchPair> pairs;
  pairs.reserve(source.size() * target.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    for (std::size_t j = 0; j < target.size(); ++j) {
      if (source[i].graph == target[j].graph) {
        throw std::invalid_argument(
            "pair_batches: source and target batches share a graph");
      }
      pairs.push_back(BatchPair{pairs.size(), i, j});
    }
  }
  return pairs;
}

}  // namespace kgfuse
