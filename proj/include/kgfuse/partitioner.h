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

// Entity-centric partitioning. Triples are grouped by head entity; groups are
// packed first-fit into batches whose linearized size stays within a
// character budget. A head group is never split: a group larger than the
// budget becomes a batch of its own and is flagged as oversized.

#ifndef KGFUSE_PARTITIONER_H_
#define KGFUSE_PARTITIONER_H_

#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "kgfuse/kg_model.h"

namespace kgfuse {

// Roughly 4 characters per token for Latin scripts and 1-2 for CJK, so the
// default leaves room for a 2 x 12k character payload plus instructions in an
// 8k-token window.
inline constexpr std::size_t kDefaultCharBudget = 12000;

struct PartitionConfig {
  // Upper bound on a batch's linearized size in characters (bytes of UTF-8),
  // counting one newline per triple.
  std::size_t char_budget = kDefaultCharBudget;
};

struct Batch {
  std::size_t batch_id = 0;
  GraphId graph;
  std::vector<Triple> triples;
  std::set<EntityId> head_entities;
  std::size_t linearized_size = 0;
  // Holds a single head group whose size exceeds the budget.
  bool oversized = false;
};

// One cell of the Cartesian product of two batch lists, by index.
struct BatchPair {
  std::size_t pair_index = 0;
  std::size_t source_batch = 0;
  std::size_t target_batch = 0;
};

// First-fit bin packing over items in the given order. Returns, per bin, the
// indices of the items it holds. An item larger than `capacity` gets a bin to
// itself that accepts nothing else.
std::vector<std::vector<std::size_t>> pack_first_fit(
    std::span<const std::size_t> sizes, std::size_t capacity);

// Head groups are ordered by descending linearized size, then ascending head
// id, and packed with pack_first_fit. Batches are numbered in creation order.
// Throws std::invalid_argument for a zero budget.
std::vector<Batch> partition(const KnowledgeGraph& graph,
                             const PartitionConfig& config);

// Row-major: pair_index = source * |target| + target. Throws
// std::invalid_argument if a source and target batch come from the same
// graph.
std::vector<BatchPair> pair_batches(std::span<const Batch> source,
                                    std::span<const Batch> target);

}  // namespace kgfuse

#endif  // KGFUSE_PARTITIONER_H_
