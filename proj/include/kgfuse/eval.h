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

// Scoring of entity alignments against a gold set.
//
// Conventions:
//  - A chosen pair is a true positive iff it appears in the gold set; every
//    other chosen pair is a false positive, including pairs whose source has
//    no gold entry.
//  - precision = TP / (TP + FP), reported as 0 and flagged when there are no
//    predictions; recall = TP / |gold|; F1 is their harmonic mean (0 when
//    both are 0).
//  - Hits@k counts gold sources whose gold target is among their top-k
//    ranked candidates. Its rate divides by |gold|; accuracy on predicted
//    divides by the number of gold sources with at least one candidate.

#ifndef KGFUSE_EVAL_H_
#define KGFUSE_EVAL_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgfuse/aggregator.h"
#include "kgfuse/ingest.h"

namespace kgfuse {

struct Score {
  std::size_t predictions = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t gold_size = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Precision is undefined (no predictions) and reported as 0.
  bool precision_undefined = false;
};

// Metrics from raw counts. Throws std::invalid_argument for a zero gold
// size or TP > predictions.
Score score_counts(std::size_t predictions, std::size_t true_positives,
                   std::size_t gold_size);

// Throws std::invalid_argument for an empty gold set.
Score score(const AlignmentTable<EntityId>& alignments,
            const GoldAlignment& gold);

struct HitsRow {
  std::size_t k = 0;
  std::size_t hits = 0;
  double rate = 0.0;
  double accuracy_on_predicted = 0.0;
  std::size_t predicted_sources = 0;
};

// Throws std::invalid_argument for k < 1 or an empty gold set.
HitsRow hits_at_k(const std::map<EntityId, std::vector<Candidate<EntityId>>>& ranked,
                  const GoldAlignment& gold, std::size_t k);

struct SweepRow {
  double tau = 0.0;
  Score score;
};

std::vector<SweepRow> threshold_sweep(const AlignmentTable<EntityId>& alignments,
                                      const GoldAlignment& gold,
                                      std::span<const double> taus);

struct ConfidenceMoments {
  std::size_t count = 0;
  double mean = 0.0;
  // Sample standard deviation; 0 for a single value.
  double sd = 0.0;
};

struct ConfidenceStats {
  // Empty when the class has no members.
  std::optional<ConfidenceMoments> true_positives;
  std::optional<ConfidenceMoments> false_positives;
};

ConfidenceStats confidence_stats(const AlignmentTable<EntityId>& alignments,
                                 const GoldAlignment& gold);

struct EvalReport {
  double tau = 0.0;
  Score score;
  std::vector<HitsRow> hits;
  std::vector<SweepRow> sweep;
  ConfidenceStats confidence;
};

inline constexpr double kDefaultSweepTaus[] = {0.0, 0.80, 0.90, 0.95};
inline constexpr std::size_t kDefaultHitsK[] = {1, 5, 10};

// `aggregated` is the unfiltered aggregation; the headline score and the
// confidence statistics use the alignments with confidence >= tau.
EvalReport evaluate(const AlignmentTable<EntityId>& aggregated,
                    const GoldAlignment& gold, double tau,
                    std::span<const double> sweep_taus = kDefaultSweepTaus,
                    std::span<const std::size_t> hits_k = kDefaultHitsK);

// Percentages with one decimal.
std::string format_percent(double fraction);

// Comma-separated report; see docs/formats.md for the column order.
void write_report_csv(const EvalReport& report, std::ostream& out);
// Human-readable tables.
void write_report_text(const EvalReport& report, std::ostream& out);
void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out);
void write_sweep_text(std::span<const SweepRow> rows, std::ostream& out);

}  // namespace kgfuse

#endif  // KGFUSE_EVAL_H_
