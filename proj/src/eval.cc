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

#include "kgfuse/eval.h"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace kgfuse {
namespace {

void require_gold(const GoldAlignment& gold) {
  if (gold.pairs.empty()) {
    throw std::invalid_argument("evaluation needs a non-empty gold set");
  }
}

bool is_true_positive(EntityId source, EntityId target,
                      const GoldAlignment& gold) {
  auto it = gold.pairs.find(source);
  return it != gold.pairs.end() && it->second == target;
}

ConfidenceMoments moments(const std::vector<double>& values) {
  ConfidenceMoments m;
  m.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - m.mean) * (v - m.mean);
    m.sd = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return m;
}

std::string format_moments(const std::optional<ConfidenceMoments>& m,
                           char sep) {
  if (!m) return fmt::format("0{}absent{}", sep, sep);
  return fmt::format("{}{}{:.3f}{}{:.3f}", m->count, sep, m->mean, sep, m->sd);
}

}  // namespace

Score score_counts(std::size_t predictions, std::size_t true_positives,
                   std::size_t gold_size) {
  if (gold_size == 0) {
    throw std::invalid_argument("evaluation needs a non-empty gold set");
  }
  if (true_positives > predictions) {
    throw std::invalid_argument("more true positives than predictions");
  }
  Score s;
  s.predictions = predictions;
  s.true_positives = true_positives;
  s.false_positives = predictions - true_positives;
  s.gold_size = gold_size;
  if (predictions == 0) {
    s.precision_undefined = true;
  } else {
    s.precision = static_cast<double>(true_positives) /
                  static_cast<double>(predictions);
  }
  s.recall =
      static_cast<double>(true_positives) / static_cast<double>(gold_size);
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

Score score(const AlignmentTable<EntityId>& alignments,
            const GoldAlignment& gold) {
  require_gold(gold);
  std::size_t tp = 0;
  for (const auto& [source, c] : alignments.chosen) {
    if (is_true_positive(source, c.target, gold)) ++tp;
  }
  return score_counts(alignments.chosen.size(), tp, gold.size());
}

HitsRow hits_at_k(
    const std::map<EntityId, std::vector<Candidate<EntityId>>>& ranked,
    const GoldAlignment& gold, std::size_t k) {
  if (k < 1) throw std::invalid_argument("Hits@k needs k >= 1");
  require_gold(gold);
  HitsRow row;
  row.k = k;
  for (const auto& [source, target] : gold.pairs) {
    auto it = ranked.find(source);
    if (it == ranked.end() || it->second.empty()) continue;
    ++row.predicted_sources;
    const auto& list = it->second;
    const std::size_t depth = std::min(k, list.size());
    for (std::size_t i = 0; i < depth; ++i) {
      if (list[i].target == target) {
        ++row.hits;
        break;
      }
    }
  }
  row.rate = static_cast<double>(row.hits) / static_cast<double>(gold.size());
  if (row.predicted_sources > 0) {
    row.accuracy_on_predicted = static_cast<double>(row.hits) /
                                static_cast<double>(row.predicted_sources);
  }
  return row;
}

std::vector<SweepRow> threshold_sweep(const AlignmentTable<EntityId>& alignments,
                                      const GoldAlignment& gold,
                                      std::span<const double> taus) {
  require_gold(gold);
  std::vector<SweepRow> rows;
  rows.reserve(taus.size());
  for (double tau : taus) {
    std::size_t predictions = 0;
    std::size_t tp = 0;
    for (const auto& [source, c] : alignments.chosen) {
      if (c.confidence < tau) continue;
      ++predictions;
      if (is_true_positive(source, c.target, gold)) ++tp;
    }
    rows.push_back(SweepRow{tau, score_counts(predictions, tp, gold.size())});
  }
  return rows;
}

ConfidenceStats confidence_stats(const AlignmentTable<EntityId>& alignments,
                                 const GoldAlignment& gold) {
  std::vector<double> tp;
  std::vector<double> fp;
  for (const auto& [source, c] : alignments.chosen) {
    (is_true_positive(source, c.target, gold) ? tp : fp)
        .push_back(c.confidence);
  }
  ConfidenceStats stats;
  if (!tp.empty()) stats.true_positives = moments(tp);
  if (!fp.empty()) stats.false_positives = moments(fp);
  return stats;
}

EvalReport evaluate(const AlignmentTable<EntityId>& aggregated,
                    const GoldAlignment& gold, double tau,
                    std::span<const double> sweep_taus,
                    std::span<const std::size_t> hits_k) {
  const auto accepted = filter_threshold(aggregated, tau);
  EvalReport report;
  report.tau = tau;
  report.score = score(accepted, gold);
  for (std::size_t k : hits_k) {
    report.hits.push_back(hits_at_k(aggregated.ranked, gold, k));
  }
  report.sweep = threshold_sweep(aggregated, gold, sweep_taus);
  report.confidence = confidence_stats(accepted, gold);
  return report;
}

std::string format_percent(double fraction) {
  return fmt::format("{:.1f}", fraction * 100.0);
}

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out) {
  out << "tau,predictions,true_positives,precision,recall,f1\n";
  for (const auto& r : rows) {
    out << fmt::format("{:.2f},{},{},{},{},{}\n", r.tau, r.score.predictions,
                       r.score.true_positives, format_percent(r.score.precision),
                       format_percent(r.score.recall),
                       format_percent(r.score.f1));
  }
}

void write_sweep_text(std::span<const SweepRow> rows, std::ostream& out) {
  out << fmt::format("{:>6}  {:>8}  {:>8}  {:>7}  {:>7}  {:>7}\n", "tau",
                     "pred", "TP", "prec%", "rec%", "F1%");
  for (const auto& r : rows) {
    out << fmt::format("{:>6.2f}  {:>8}  {:>8}  {:>7}  {:>7}  {:>7}\n", r.tau,
                       r.score.predictions, r.score.true_positives,
                       format_percent(r.score.precision),
                       format_percent(r.score.recall),
                       format_percent(r.score.f1));
  }
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
  const auto& s = report.score;
  out << "metric,value\n";
  out << fmt::format("tau,{:.2f}\n", report.tau);
  out << fmt::format("predictions,{}\n", s.predictions);
  out << fmt::format("true_positives,{}\n", s.true_positives);
  out << fmt::format("false_positives,{}\n", s.false_positives);
  out << fmt::format("gold_size,{}\n", s.gold_size);
  out << fmt::format("precision,{}\n", format_percent(s.precision));
  out << fmt::format("recall,{}\n", format_percent(s.recall));
  out << fmt::format("f1,{}\n", format_percent(s.f1));
  out << fmt::format("precision_undefined,{}\n", s.precision_undefined ? 1 : 0);
  out << "\n";
  out << "k,hits,rate,accuracy_on_predicted,predicted_sources\n";
  for (const auto& h : report.hits) {
    out << fmt::format("{},{},{},{},{}\n", h.k, h.hits, format_percent(h.rate),
                       format_percent(h.accuracy_on_predicted),
                       h.predicted_sources);
  }
  out << "\n";
  write_sweep_csv(report.sweep, out);
  out << "\n";
  out << "class,count,mean_confidence,sd_confidence\n";
  out << "tp," << format_moments(report.confidence.true_positives, ',') << '\n';
  out << "fp," << format_moments(report.confidence.false_positives, ',')
      << '\n';
}

void write_report_text(const EvalReport& report, std::ostream& out) {
  const auto& s = report.score;
  out << fmt::format("Alignment metrics (tau = {:.2f})\n", report.tau);
  out << fmt::format("  {:<28}{:>10}\n", "Unique alignment predictions",
                     s.predictions);
  out << fmt::format("  {:<28}{:>10}\n", "True positives", s.true_positives);
  out << fmt::format("  {:<28}{:>10}\n", "False positives", s.false_positives);
  out << fmt::format("  {:<28}{:>10}\n", "Gold pairs", s.gold_size);
  out << fmt::format("  {:<28}{:>9}%{}\n", "Precision",
                     format_percent(s.precision),
                     s.precision_undefined ? " (no predictions)" : "");
  out << fmt::format("  {:<28}{:>9}%\n", "Recall", format_percent(s.recall));
  out << fmt::format("  {:<28}{:>9}%\n", "F1", format_percent(s.f1));
  out << "\nHits@k\n";
  out << fmt::format("  {:>4}  {:>8}  {:>7}  {:>14}\n", "k", "hits", "rate%",
                     "acc. predicted");
  for (const auto& h : report.hits) {
    out << fmt::format("  {:>4}  {:>8}  {:>7}  {:>13}%\n", h.k, h.hits,
                       format_percent(h.rate),
                       format_percent(h.accuracy_on_predicted));
  }
  out << "\nThreshold sweep\n";
  write_sweep_text(report.sweep, out);
  out << "\nConfidence by class (accepted alignments)\n";
  for (const auto& [name, m] :
       {std::pair{"TP", report.confidence.true_positives},
        std::pair{"FP", report.confidence.false_positives}}) {
    if (m) {
      out << fmt::format("  {}: n={} mean={:.3f} sd={:.3f}\n", name, m->count,
                         m->mean, m->sd);
    } else {
      out << fmt::format("  {}: absent\n", name);
    }
  }
}

}  // namespace kgfuse
