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

#include "kgfuse/pipeline.h"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "kgfuse/eval.h"
#include "kgfuse/response_cache.h"
#include "kgfuse/synthetic.h"
#include "support/fakes.h"
#include "support/oracle_world.h"
#include "support/test_graphs.h"

namespace kgfuse {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using test_support::ScriptedBackend;

const bool kQuietLogs = [] {
  spdlog::set_level(spdlog::level::warn);
  return true;
}();

DatasetBundle small_bundle(std::size_t graphs = 2, std::uint64_t seed = 3) {
  SyntheticConfig c;
  c.graphs = graphs;
  c.entities = 60;
  c.shared_entities = 40;
  c.relations = 6;
  c.seed = seed;
  return make_synthetic(c);
}

PipelineConfig small_config() {
  PipelineConfig c;
  c.partition.char_budget = 600;
  c.tau = 0.9;
  return c;
}

TEST(PipelineConfigTest, Validation) {
  auto c = small_config();
  EXPECT_NO_THROW(validate(c));
  c.partition.char_budget = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = small_config();
  c.tau = 1.2;
  EXPECT_THROW(validate(c), ConfigError);
  c = small_config();
  c.workers = 0;
  EXPECT_THROW(validate(c), ConfigError);
  EXPECT_EQ(to_string(PairStatus::kSkippedCached), "skipped-cached");
  EXPECT_EQ(to_string(PairStatus::kSucceeded), "succeeded");
  EXPECT_EQ(to_string(PairStatus::kFailed), "failed");
}

TEST(RunPipelineTest, RejectsBadGraphLists) {
  const auto bundle = small_bundle();
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0, 1), bundle.graphs);
  EXPECT_THROW(run_pipeline(std::span(bundle.graphs).first(1), oracle,
                            small_config()),
               ConfigError);
  const std::vector<KnowledgeGraph> twice = {bundle.graphs[0], bundle.graphs[0]};
  EXPECT_THROW(run_pipeline(twice, oracle, small_config()), ConfigError);
}

TEST(RunPipelineTest, PerfectOracleRecoversGold) {
  const auto bundle = small_bundle();
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0, 1), bundle.graphs);
  const auto result = run_pipeline(bundle.graphs, oracle, small_config());

  ASSERT_EQ(result.iterations.size(), 1u);
  const auto& it = result.iterations[0];
  EXPECT_EQ(it.iteration, 2);
  EXPECT_THAT(it.source_graphs, ElementsAre(GraphId{1}));
  EXPECT_EQ(it.incoming, GraphId{2});
  EXPECT_GT(it.source_batches, 1u);
  EXPECT_EQ(it.pairs.size(), it.source_batches * it.target_batches);
  EXPECT_EQ(it.count(PairStatus::kSucceeded), it.pairs.size());

  const auto s = score(it.accepted.entities, bundle.gold[0]);
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_EQ(s.recall, 1.0);
  EXPECT_EQ(result.unified.graph().entities().size(), 60u + 60u - 40u);
  EXPECT_EQ(test_support::unified_entity_classes(result.unified),
            test_support::gold_entity_classes(bundle));
  // Every relation is folded.
  EXPECT_EQ(result.unified.graph().relations().size(), 6u);
}

TEST(RunPipelineTest, ThreeGraphsFoldTransitively) {
  const auto bundle = small_bundle(3, 5);
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0, 1), bundle.graphs);
  const auto result = run_pipeline(bundle.graphs, oracle, small_config());
  ASSERT_EQ(result.iterations.size(), 2u);
  EXPECT_THAT(result.iterations[1].source_graphs,
              ElementsAre(GraphId{1}, GraphId{2}));
  EXPECT_EQ(result.iterations[1].incoming, GraphId{3});
  EXPECT_EQ(test_support::unified_entity_classes(result.unified),
            test_support::gold_entity_classes(bundle));
  EXPECT_EQ(result.unified.graph().entities().size(), 60u + 2 * 20u);
  EXPECT_THAT(result.unified.members(),
              ElementsAre(GraphId{1}, GraphId{2}, GraphId{3}));
}

TEST(RunPipelineTest, WorkerCountDoesNotChangeResults) {
  const auto bundle = small_bundle(3, 8);
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0.3, 4),
                       bundle.graphs);
  auto config = small_config();
  config.workers = 1;
  const auto reference = run_pipeline(bundle.graphs, oracle, config);
  for (std::size_t workers : {4u, 8u}) {
    config.workers = workers;
    const auto result = run_pipeline(bundle.graphs, oracle, config);
    EXPECT_EQ(result.unified, reference.unified) << workers;
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_EQ(result.iterations[i].aggregated,
                reference.iterations[i].aggregated);
    }
  }
}

TEST(RunPipelineTest, FailedPairIsRecordedAndRunContinues) {
  const auto bundle = small_bundle();
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0, 1), bundle.graphs);
  ScriptedBackend flaky([&](const Prompt& p) {
    if (p.meta.pair_index == 1) throw BackendError("server hiccup", false);
    return oracle.submit(p);
  });
  const auto result = run_pipeline(bundle.graphs, flaky, small_config());
  const auto& it = result.iterations[0];
  EXPECT_EQ(it.count(PairStatus::kFailed), 1u);
  EXPECT_EQ(it.pairs[1].status, PairStatus::kFailed);
  EXPECT_THAT(it.pairs[1].error, HasSubstr("server hiccup"));
  EXPECT_EQ(it.count(PairStatus::kSucceeded), it.pairs.size() - 1);
}

TEST(RunPipelineTest, NonBackendExceptionsPropagate) {
  const auto bundle = small_bundle();
  ScriptedBackend broken([](const Prompt&) -> RawResponse {
    throw std::logic_error("bug");
  });
  EXPECT_THROW(run_pipeline(bundle.graphs, broken, small_config()),
               std::logic_error);
}

TEST(RunPipelineTest, MalformedAnswersAreSalvaged) {
  const auto bundle = small_bundle();
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0, 1), bundle.graphs);
  ScriptedBackend chatty([&](const Prompt& p) {
    auto r = oracle.submit(p);
    r.text = "Here is the JSON:\n```json\n" + r.text + "\n```";
    if (p.meta.pair_index % 2 == 0) r.text.resize(r.text.size() / 2);
    return r;
  });
  const auto result = run_pipeline(bundle.graphs, chatty, small_config());
  const auto& it = result.iterations[0];
  EXPECT_EQ(it.count(PairStatus::kSucceeded), it.pairs.size());
  std::size_t truncated = 0;
  for (const auto& p : it.pairs) truncated += p.diagnostics.truncated;
  EXPECT_GT(truncated, 0u);
  const auto s = score(it.accepted.entities, bundle.gold[0]);
  EXPECT_EQ(s.precision, 1.0);
}

TEST(RunPipelineTest, OnAlignedRunsBeforeEachFusion) {
  const auto bundle = small_bundle(3, 2);
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0, 1), bundle.graphs);
  auto config = small_config();
  std::vector<int> seen;
  config.on_aligned = [&](const IterationReport& r) {
    seen.push_back(r.iteration);
  };
  run_pipeline(bundle.graphs, oracle, config);
  EXPECT_THAT(seen, ElementsAre(2, 3));
}

TEST(CheckpointTest, FatalAbortThenResumeMatchesUninterruptedRun) {
  const auto bundle = small_bundle(3, 11);
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0.2, 6),
                       bundle.graphs);
  const auto reference = run_pipeline(bundle.graphs, oracle, small_config());

  const auto dir = test_support::fresh_dir("checkpoint");
  auto config = small_config();
  config.checkpoint_dir = dir;
  std::atomic<int> calls{0};
  const int iteration_two_pairs =
      static_cast<int>(reference.iterations[0].pairs.size());
  ScriptedBackend dying([&](const Prompt& p) {
    if (p.meta.iteration == 3 && calls.fetch_add(1) == 3) {
      throw BackendError("key revoked", true);
    }
    return oracle.submit(p);
  });
  try {
    run_pipeline(bundle.graphs, dying, config);
    FAIL() << "expected PipelineAborted";
  } catch (const PipelineAborted& e) {
    EXPECT_EQ(e.iteration(), 3);
    EXPECT_THAT(e.what(), HasSubstr("key revoked"));
  }
  EXPECT_EQ(dying.calls(), iteration_two_pairs + 4);
  const auto partial = load_checkpoint_unified(dir);
  ASSERT_TRUE(partial.has_value());
  EXPECT_THAT(partial->members(), ElementsAre(GraphId{1}, GraphId{2}));

  ScriptedBackend healthy([&](const Prompt& p) { return oracle.submit(p); });
  const auto resumed = run_pipeline(bundle.graphs, healthy, config);
  EXPECT_EQ(resumed.unified, reference.unified);
  ASSERT_EQ(resumed.iterations.size(), 2u);
  EXPECT_TRUE(resumed.iterations[0].restored);
  EXPECT_EQ(resumed.iterations[0].aggregated,
            reference.iterations[0].aggregated);
  const auto& third = resumed.iterations[1];
  EXPECT_EQ(third.count(PairStatus::kSkippedCached), 3u);
  EXPECT_EQ(healthy.calls(), static_cast<int>(third.pairs.size()) - 3);
  EXPECT_EQ(third.aggregated, reference.iterations[1].aggregated);

  // A finished run resumes to the same result without any backend call.
  ScriptedBackend idle([&](const Prompt& p) { return oracle.submit(p); });
  EXPECT_EQ(run_pipeline(bundle.graphs, idle, config).unified,
            reference.unified);
  EXPECT_EQ(idle.calls(), 0);
}

TEST(CheckpointTest, TornLedgerLineIsIgnored) {
  const auto bundle = small_bundle();
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0, 1), bundle.graphs);
  const auto dir = test_support::fresh_dir("torn_ledger");
  auto config = small_config();
  config.checkpoint_dir = dir;
  ScriptedBackend dying([&](const Prompt& p) -> RawResponse {
    if (p.meta.pair_index == 2) throw BackendError("quota", true);
    return oracle.submit(p);
  });
  EXPECT_THROW(run_pipeline(bundle.graphs, dying, config), PipelineAborted);
  {
    std::ofstream out(dir / "pairs_iter_2.jsonl", std::ios::app);
    out << "{\"pair_index\": 7, \"status\": \"succ";
  }
  ScriptedBackend healthy([&](const Prompt& p) { return oracle.submit(p); });
  const auto result = run_pipeline(bundle.graphs, healthy, config);
  EXPECT_EQ(result.iterations[0].count(PairStatus::kSkippedCached), 2u);
  const auto s = score(result.iterations[0].accepted.entities, bundle.gold[0]);
  EXPECT_EQ(s.recall, 1.0);
}

TEST(CheckpointTest, DifferentSettingsAreRejected) {
  const auto bundle = small_bundle();
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0, 1), bundle.graphs);
  const auto dir = test_support::fresh_dir("settings");
  auto config = small_config();
  config.checkpoint_dir = dir;
  run_pipeline(bundle.graphs, oracle, config);
  config.tau = 0.5;
  EXPECT_THROW(run_pipeline(bundle.graphs, oracle, config), ConfigError);

  const auto other = test_support::fresh_dir("settings_other");
  auto c2 = small_config();
  c2.checkpoint_dir = other;
  const std::vector<KnowledgeGraph> reversed = {bundle.graphs[1],
                                                bundle.graphs[0]};
  run_pipeline(bundle.graphs, oracle, c2);
  EXPECT_THROW(run_pipeline(reversed, oracle, c2), ConfigError);
}

TEST(CheckpointTest, EmptyDirectoryHasNoUnifiedGraph) {
  EXPECT_FALSE(
      load_checkpoint_unified(test_support::fresh_dir("empty_ckpt")).has_value());
}

TEST(CacheTest, WarmCacheServesEveryPair) {
  const auto bundle = small_bundle();
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0.3, 2),
                       bundle.graphs);
  ScriptedBackend counted([&](const Prompt& p) { return oracle.submit(p); });
  const auto path = test_support::fresh_dir("warm") / "responses.jsonl";
  PipelineResult cold, warm;
  {
    ResponseCache cache(path);
    CachingBackend backend(counted, cache, BackendConfig{});
    cold = run_pipeline(bundle.graphs, backend, small_config());
  }
  const int cold_calls = counted.calls();
  {
    ResponseCache cache(path);
    CachingBackend backend(counted, cache, BackendConfig{});
    warm = run_pipeline(bundle.graphs, backend, small_config());
    EXPECT_EQ(backend.misses(), 0u);
  }
  EXPECT_EQ(counted.calls(), cold_calls);
  EXPECT_EQ(warm.unified, cold.unified);
  EXPECT_EQ(warm.iterations[0].count(PairStatus::kSkippedCached),
            warm.iterations[0].pairs.size());
}

TEST(EstimatePlanTest, MatchesPromptsActuallySent) {
  const auto bundle = small_bundle(3, 4);
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0, 1), bundle.graphs);
  std::mutex mu;
  std::map<int, std::size_t> chars;
  std::map<int, std::size_t> pairs;
  ScriptedBackend recording([&](const Prompt& p) {
    {
      std::lock_guard lock(mu);
      chars[p.meta.iteration] += p.system.size() + p.user.size();
      ++pairs[p.meta.iteration];
    }
    return oracle.submit(p);
  });
  auto config = small_config();
  const auto result = run_pipeline(bundle.graphs, recording, config);
  const auto plan = estimate_plan(bundle.graphs, config);
  ASSERT_EQ(plan.size(), 2u);
  EXPECT_EQ(plan[0].iteration, 2);
  EXPECT_EQ(plan[0].source_batches, result.iterations[0].source_batches);
  EXPECT_EQ(plan[0].target_batches, result.iterations[0].target_batches);
  EXPECT_EQ(plan[0].pairs, pairs[2]);
  EXPECT_EQ(plan[0].prompt_chars, chars[2]);
  // Later iterations assume no merges: an upper bound.
  EXPECT_GE(plan[1].prompt_chars, chars[3]);
  EXPECT_GE(plan[1].source_batches, result.iterations[1].source_batches);
  EXPECT_EQ(plan[1].pairs, plan[1].source_batches * plan[1].target_batches);
}

TEST(EstimatePlanTest, CountsPlaceholdersInCustomTemplates) {
  const auto bundle = small_bundle();
  OracleBackend oracle(test_support::bundle_oracle(bundle, 0, 1), bundle.graphs);
  std::mutex mu;
  std::size_t chars = 0;
  ScriptedBackend recording([&](const Prompt& p) {
    {
      std::lock_guard lock(mu);
      chars += p.system.size() + p.user.size();
    }
    return oracle.submit(p);
  });
  auto config = small_config();
  config.prompts.user =
      "{{source_count}} source lines ({{source_count}}):\n{{source_block}}\n"
      "{{target_count}} target lines:\n{{target_block}}\n";
  run_pipeline(bundle.graphs, recording, config);
  EXPECT_EQ(estimate_plan(bundle.graphs, config)[0].prompt_chars, chars);
}

TEST(EstimatePlanTest, VolumeShrinksAsBudgetGrows) {
  const auto bundle = small_bundle();
  std::size_t previous_pairs = SIZE_MAX;
  std::size_t previous_chars = SIZE_MAX;
  for (std::size_t budget : {300, 600, 1200, 2400, 100000}) {
    auto config = small_config();
    config.partition.char_budget = budget;
    const auto plan = estimate_plan(bundle.graphs, config);
    EXPECT_LE(plan[0].pairs, previous_pairs);
    EXPECT_LE(plan[0].prompt_chars, previous_chars);
    previous_pairs = plan[0].pairs;
    previous_chars = plan[0].prompt_chars;
  }
  EXPECT_EQ(previous_pairs, 1u);
}

}  // namespace
}  // namespace kgfuse
