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

// The rolling fusion loop. Iteration t (2..N) aligns input graph t against
// the unified graph built from graphs 1..t-1 and folds it in:
//
//   partition both sides -> pair every batch -> prompt the backend per pair
//   (worker pool) -> salvage and resolve -> aggregate -> threshold -> fuse.
//
// With a checkpoint directory, every answered batch pair is appended to a
// per-iteration ledger as soon as it completes and the unified graph is
// snapshotted after each fusion step, so an aborted run resumes at the same
// iteration without resending answered pairs.

#ifndef KGFUSE_PIPELINE_H_
#define KGFUSE_PIPELINE_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgfuse/aggregator.h"
#include "kgfuse/backend.h"
#include "kgfuse/errors.h"
#include "kgfuse/fusion.h"
#include "kgfuse/linearizer.h"
#include "kgfuse/partitioner.h"
#include "kgfuse/response_parser.h"

namespace kgfuse {

enum class PairStatus { kSucceeded, kFailed, kSkippedCached };

std::string_view to_string(PairStatus status);

struct PairOutcome {
  std::size_t pair_index = 0;
  std::size_t source_batch = 0;
  std::size_t target_batch = 0;
  PairStatus status = PairStatus::kFailed;
  // Failure message for kFailed.
  std::string error;
  ParseDiagnostics diagnostics;
  std::size_t parsed_items = 0;
  std::size_t entity_predictions = 0;
  std::size_t relation_predictions = 0;
  std::size_t dropped = 0;
  std::size_t ambiguous = 0;
};

struct IterationReport;

struct PipelineConfig {
  PartitionConfig partition;
  double tau = 0.90;
  std::size_t workers = 1;
  PromptTemplate prompts = default_prompt_template();
  AggregateOptions aggregate;
  // Echoed into prompt metadata.
  std::string model_name = "oracle";
  double temperature = 0.0;
  std::optional<std::filesystem::path> checkpoint_dir;
  // Called after an iteration's aggregation and before its fusion step.
  std::function<void(const IterationReport&)> on_aligned;
};

void validate(const PipelineConfig& config);

struct IterationReport {
  int iteration = 0;
  std::vector<GraphId> source_graphs;
  GraphId incoming;
  std::size_t source_batches = 0;
  std::size_t target_batches = 0;
  // One entry per batch pair, by pair index. Empty for iterations restored
  // from a checkpoint.
  std::vector<PairOutcome> pairs;
  AlignmentSet aggregated;
  AlignmentSet accepted;
  bool restored = false;

  std::size_t count(PairStatus status) const;
};

struct PipelineResult {
  UnifiedGraph unified;
  std::vector<IterationReport> iterations;
};

// A fatal backend error stopped the run. With a checkpoint directory the
// run can be resumed from `iteration`.
class PipelineAborted : public Error {
 public:
  PipelineAborted(const std::string& what, int iteration)
      : Error(what), iteration_(iteration) {}

  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// Aligns `incoming` against `unified` without fusing. `iteration` names the
// checkpoint ledger.
IterationReport align_iteration(const UnifiedGraph& unified,
                                const KnowledgeGraph& incoming,
                                AlignmentBackend& backend,
                                const PipelineConfig& config, int iteration);

// Requires at least two graphs with distinct, nonzero ids. Resumes from the
// checkpoint directory when it holds state for the same graph sequence.
PipelineResult run_pipeline(std::span<const KnowledgeGraph> graphs,
                            AlignmentBackend& backend,
                            const PipelineConfig& config);

struct IterationPlan {
  int iteration = 0;
  std::size_t source_batches = 0;
  std::size_t target_batches = 0;
  std::size_t pairs = 0;
  // Sum of system and user prompt sizes over all pairs.
  std::size_t prompt_chars = 0;
  std::size_t oversized_batches = 0;
};

// Batch and prompt volume per iteration without calling any backend.
// Iterations after the first assume no merges, so their source side is an
// upper bound.
std::vector<IterationPlan> estimate_plan(std::span<const KnowledgeGraph> graphs,
                                         const PipelineConfig& config);

// The unified graph of the last completed iteration in `checkpoint_dir`, or
// nullopt when no iteration has completed there.
std::optional<UnifiedGraph> load_checkpoint_unified(
    const std::filesystem::path& checkpoint_dir);

}  // namespace kgfuse

#endif  // KGFUSE_PIPELINE_H_
