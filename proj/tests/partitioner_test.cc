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

#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "kgfuse/linearizer.h"
#include "support/test_graphs.h"

namespace kgfuse {
namespace {

using ::testing::ElementsAre;
using test_support::make_graph;

// Three heads, one triple each; every line is 39 characters plus a newline.
KnowledgeGraph three_forty_char_groups() {
  return make_graph(1, "en",
                    {{1, "head-one-xxxx"},
                     {2, "head-two-xxxx"},
                     {3, "head-thr-xxxx"},
                     {9, "ttttttttttt"}},
                    {{1, "rrrrrrrrrrrrr"}}, {{1, 1, 9}, {2, 1, 9}, {3, 1, 9}});
}

std::vector<Batch> batches_of(std::uint32_t graph, std::size_t n) {
  std::vector<Batch> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].batch_id = i;
    out[i].graph = GraphId{graph};
  }
  return out;
}

// Independent first-fit reference.
std::vector<std::size_t> first_fit_bins(const std::vector<std::size_t>& sizes,
                                        std::size_t capacity) {
  std::vector<std::size_t> loads;
  std::vector<std::size_t> bin_of;
  for (auto s : sizes) {
    std::size_t b = 0;
    for (; b < loads.size(); ++b) {
      if (loads[b] + s <= capacity) break;
    }
    if (b == loads.size()) loads.push_back(0);
    loads[b] += s;
    bin_of.push_back(b);
  }
  return bin_of;
}

TEST(PartitionTest, FortyCharGroupsUnderBudgetHundred) {
  const auto g = three_forty_char_groups();
  for (const auto& t : g.triples()) {
    ASSERT_EQ(linearize_triple(t, g).size() + 1, 40u);
  }
  const auto batches = partition(g, PartitionConfig{100});
  ASSERT_EQ(batches.size(), 2u);
  EXPECT_EQ(batches[0].linearized_size, 80u);
  EXPECT_EQ(batches[1].linearized_size, 40u);
  EXPECT_THAT(batches[0].head_entities, ElementsAre(EntityId{1}, EntityId{2}));
  EXPECT_THAT(batches[1].head_entities, ElementsAre(EntityId{3}));
  EXPECT_EQ(batches[0].batch_id, 0u);
  EXPECT_EQ(batches[1].batch_id, 1u);
  EXPECT_FALSE(batches[0].oversized);
  EXPECT_EQ(batches[0].graph, GraphId{1});
}

TEST(PartitionTest, BudgetFitsExactly) {
  const auto batches = partition(three_forty_char_groups(), PartitionConfig{120});
  ASSERT_EQ(batches.size(), 1u);
  EXPECT_EQ(batches[0].linearized_size, 120u);
  EXPECT_FALSE(batches[0].oversized);
}

TEST(PartitionTest, OversizedGroupStaysWhole) {
  const auto g = make_graph(1, "en", {{1, "a"}, {2, "b"}, {3, "c"}},
                            {{1, "r"}, {2, "s"}},
                            {{1, 1, 2}, {1, 2, 3}, {1, 1, 3}, {2, 1, 3}});
  const auto batches = partition(g, PartitionConfig{10});
  ASSERT_EQ(batches.size(), 2u);
  EXPECT_EQ(batches[0].triples.size(), 3u);
  EXPECT_EQ(batches[0].linearized_size, 18u);
  EXPECT_TRUE(batches[0].oversized);
  EXPECT_EQ(batches[1].linearized_size, 6u);
  EXPECT_FALSE(batches[1].oversized);
}

TEST(PartitionTest, LargerGroupsPackFirst) {
  const auto g = make_graph(1, "en", {{1, "a"}, {2, "bbbbbbbbbb"}, {3, "c"}},
                            {{1, "r"}}, {{1, 1, 3}, {2, 1, 3}});
  const auto batches = partition(g, PartitionConfig{100});
  ASSERT_EQ(batches.size(), 1u);
  EXPECT_EQ(batches[0].triples.front().head, EntityId{2});
}

TEST(PartitionTest, EmptyGraphAndZeroBudget) {
  const auto g = make_graph(1, "en", {{1, "a"}}, {{1, "r"}}, {});
  EXPECT_TRUE(partition(g, PartitionConfig{10}).empty());
  EXPECT_THROW(partition(g, PartitionConfig{0}), std::invalid_argument);
}

TEST(PairBatchesTest, RowMajorProduct) {
  const auto src = batches_of(1, 3);
  const auto tgt = batches_of(2, 4);
  const auto pairs = pair_batches(src, tgt);
  ASSERT_EQ(pairs.size(), 12u);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(pairs[i].pair_index, i);
    EXPECT_EQ(pairs[i].source_batch, i / 4);
    EXPECT_EQ(pairs[i].target_batch, i % 4);
  }
  EXPECT_EQ(pair_batches(batches_of(1, 24), batches_of(2, 32)).size(), 768u);
  EXPECT_TRUE(pair_batches(batches_of(1, 0), tgt).empty());
}

TEST(PairBatchesTest, RejectsSameGraph) {
  const auto a = batches_of(1, 2);
  EXPECT_THROW(pair_batches(a, a), std::invalid_argument);
}

TEST(PackFirstFitTest, MatchesReference) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 300; ++round) {
    std::uniform_int_distribution<std::size_t> n(0, 30), size(1, 60);
    std::vector<std::size_t> sizes(n(rng));
    for (auto& s : sizes) s = size(rng);
    const std::size_t capacity = size(rng) + 10;
    const auto bins = pack_first_fit(sizes, capacity);
    const auto expected = first_fit_bins(sizes, capacity);
    std::vector<std::size_t> got(sizes.size());
    for (std::size_t b = 0; b < bins.size(); ++b) {
      for (auto i : bins[b]) got[i] = b;
    }
    EXPECT_EQ(got, expected);
  }
}

TEST(PartitionPropertyTest, CoverAtomicityAndBudget) {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 200; ++round) {
    const auto g = test_support::random_graph(rng, 1, 40, 6, 120);
    const std::size_t budget =
        std::uniform_int_distribution<std::size_t>(1, 400)(rng);
    const auto batches = partition(g, PartitionConfig{budget});

    std::map<Triple, int> seen;
    std::map<EntityId, std::size_t> head_batch;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& batch = batches[b];
      EXPECT_EQ(batch.batch_id, b);
      EXPECT_FALSE(batch.triples.empty());
      std::size_t size = 0;
      for (const auto& t : batch.triples) {
        ++seen[t];
        size += linearize_triple(t, g).size() + 1;
        EXPECT_TRUE(batch.head_entities.contains(t.head));
        auto [it, inserted] = head_batch.emplace(t.head, b);
        EXPECT_EQ(it->second, b) << "head group split across batches";
      }
      EXPECT_EQ(size, batch.linearized_size);
      EXPECT_EQ(linearize_batch(batch, g).size() + 1, size);
      if (batch.linearized_size > budget) {
        EXPECT_TRUE(batch.oversized);
        EXPECT_EQ(batch.head_entities.size(), 1u);
      } else {
        EXPECT_FALSE(batch.oversized);
      }
    }
    EXPECT_EQ(seen.size(), g.triples().size());
    for (const auto& [t, count] : seen) EXPECT_EQ(count, 1);
  }
}

}  // namespace
}  // namespace kgfuse
