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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "kgfuse/aggregator.h"
#include "kgfuse/dump.h"
#include "kgfuse/eval.h"
#include "kgfuse/fusion.h"
#include "kgfuse/ingest.h"
#include "kgfuse/linearizer.h"
#include "kgfuse/oracle_backend.h"
#include "kgfuse/partitioner.h"
#include "kgfuse/pipeline.h"
#include "kgfuse/response_parser.h"
#include "kgfuse/synthetic.h"
#include "support/count_fixtures.h"
#include "support/oracle_world.h"
#include "support/test_graphs.h"

namespace kgfuse::acceptance {
namespace {

using Clock = std::chrono::steady_clock;
using test_support::Band;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Accumulates failed checks; the first few are kept for the report line.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_ < 3) problems_.push_back(what);
    ++failures_;
  }
  // |actual - expected| <= 0.05 percentage points.
  void near_pt(double fraction, double expected, const std::string& what) {
    const double pt = 100.0 * fraction;
    expect(std::fabs(pt - expected) <= 0.05 + 1e-9,
           fmt::format("{} = {:.3f} vs {:.1f}", what, pt, expected));
  }
  Outcome outcome(std::string summary) const {
    if (failures_ == 0) return {true, std::move(summary)};
    std::string detail = fmt::format("{} failed check(s): {}", failures_,
                                     fmt::join(problems_, "; "));
    return {false, detail};
  }

 private:
  std::size_t failures_ = 0;
  std::vector<std::string> problems_;
};

constexpr std::size_t kGold = 15000;

// 1. Counts of the headline run.
Outcome headline_counts() {
  Checker c;
  const auto s = score_counts(5416, 3543, kGold);
  c.expect(s.false_positives == 1873, "FP != 1873");
  c.near_pt(s.precision, 65.4, "precision");
  c.near_pt(s.recall, 23.6, "recall");
  c.near_pt(s.f1, 34.7, "F1");
  return c.outcome(fmt::format("P={}% R={}% F1={}%", format_percent(s.precision),
                               format_percent(s.recall),
                               format_percent(s.f1)));
}

// 2. Threshold sweep over a dump whose confidence bands reproduce each
// expected (predictions, TP) row.
struct ExpectedSweepRow {
  double tau;
  std::size_t predictions, tp;
  double precision, recall, f1;
};

Outcome threshold_rows() {
  const std::vector<ExpectedSweepRow> expected = {
      {0.00, 5416, 3543, 65.4, 23.6, 34.7},
      {0.80, 4309, 3540, 82.2, 23.6, 36.6},
      {0.90, 4002, 3520, 88.0, 23.5, 37.0},
      {0.95, 3483, 3219, 92.4, 21.4, 34.8},
  };
  // Band i holds the rows added when tau drops past its confidence.
  std::vector<Band> bands;
  std::size_t prev_pred = 0, prev_tp = 0;
  const double band_conf[] = {0.97, 0.92, 0.85, 0.50};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& row = expected[expected.size() - 1 - i];
    bands.push_back(
        {row.predictions - prev_pred, row.tp - prev_tp, band_conf[i]});
    prev_pred = row.predictions;
    prev_tp = row.tp;
  }

  AlignmentDump dump;
  dump.iteration = 2;
  dump.source_graphs = {GraphId{1}};
  dump.incoming = GraphId{2};
  dump.aggregated.entities = test_support::banded_table(bands);
  std::stringstream file;
  write_dump(dump, file);
  const auto loaded = read_dump(file, "sweep-dump");

  std::vector<double> taus;
  for (const auto& row : expected) taus.push_back(row.tau);
  const auto rows = threshold_sweep(loaded.aggregated.entities,
                                    test_support::identity_gold(kGold), taus);
  Checker c;
  std::vector<std::string> shown;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& p = expected[i];
    const auto& s = rows[i].score;
    const auto tag = fmt::format("tau={:.2f}", p.tau);
    c.expect(s.predictions == p.predictions && s.true_positives == p.tp,
             tag + " counts");
    c.near_pt(s.precision, p.precision, tag + " P");
    c.near_pt(s.recall, p.recall, tag + " R");
    c.near_pt(s.f1, p.f1, tag + " F1");
    shown.push_back(fmt::format("{:.2f}:{}/{}/{}", p.tau,
                                format_percent(s.precision),
                                format_percent(s.recall),
                                format_percent(s.f1)));
  }
  return c.outcome(fmt::format("rows {}", fmt::join(shown, " ")));
}

// 3. Hits@k. 3,982 predicted sources is the only denominator consistent with
// both expected accuracy-on-predicted values.
Outcome hits_rows() {
  const std::size_t top = 3516, second = 3543 - 3516, predicted = 3982;
  const auto table =
      test_support::ranked_table(top, second, predicted - top - second);
  const auto gold = test_support::identity_gold(kGold);
  const auto h1 = hits_at_k(table.ranked, gold, 1);
  const auto h5 = hits_at_k(table.ranked, gold, 5);
  const auto h10 = hits_at_k(table.ranked, gold, 10);
  Checker c;
  c.expect(h1.hits == 3516 && h5.hits == 3543 && h10.hits == 3543,
           "hit counts");
  c.near_pt(h1.rate, 23.4, "Hits@1 rate");
  c.near_pt(h5.rate, 23.6, "Hits@5 rate");
  c.near_pt(h10.rate, 23.6, "Hits@10 rate");
  c.near_pt(h1.accuracy_on_predicted, 88.3, "Hits@1 acc");
  c.near_pt(h5.accuracy_on_predicted, 89.0, "Hits@5 acc");
  const double gap = h5.accuracy_on_predicted - h1.accuracy_on_predicted;
  c.expect(format_percent(gap) == "0.7",
           fmt::format("Hits@1->Hits@5 gap {}", format_percent(gap)));
  return c.outcome(fmt::format(
      "Hits@1 {}% (acc {}%), Hits@5 {}% (acc {}%), gap {} pt",
      format_percent(h1.rate), format_percent(h1.accuracy_on_predicted),
      format_percent(h5.rate), format_percent(h5.accuracy_on_predicted),
      format_percent(gap)));
}

// End-to-end scenarios over synthetic bundles and the oracle backend.
struct Scenario {
  SyntheticConfig data;
  double fp_rate = 0.0;
  std::uint64_t oracle_seed = 1;
  std::size_t char_budget = kDefaultCharBudget;
};

struct ScenarioRun {
  DatasetBundle bundle;
  PipelineResult result;
  EvalReport report;
  // report.csv, unified graph and provenance, concatenated.
  std::string bytes;
};

ScenarioRun run_scenario(const Scenario& s, std::size_t workers) {
  ScenarioRun run;
  run.bundle = make_synthetic(s.data);
  OracleBackend oracle(
      test_support::bundle_oracle(run.bundle, s.fp_rate, s.oracle_seed),
      run.bundle.graphs);
  PipelineConfig config;
  config.partition.char_budget = s.char_budget;
  config.workers = workers;
  run.result = run_pipeline(run.bundle.graphs, oracle, config);
  const auto& first = run.result.iterations.front();
  run.report = evaluate(first.aggregated.entities,
                        *run.bundle.find_gold(first.source_graphs.front(),
                                              first.incoming),
                        config.tau);
  std::ostringstream out;
  write_report_csv(run.report, out);
  write_generic(run.result.unified.graph(), out);
  write_provenance(run.result.unified, out);
  run.bytes = out.str();
  return run;
}

Scenario perfect_pair() {
  Scenario s;
  s.data.graphs = 2;
  s.data.entities = 200;
  s.data.shared_entities = 150;
  s.data.seed = 4;
  s.char_budget = 3000;
  return s;
}

Scenario noisy_pair() {
  Scenario s;
  s.data.graphs = 2;
  s.data.entities = 2000;
  s.data.shared_entities = 1500;
  s.data.seed = 5;
  s.fp_rate = 0.35;
  s.oracle_seed = 2026;
  return s;
}

Scenario perfect_triple() {
  Scenario s;
  s.data.graphs = 3;
  s.data.entities = 200;
  s.data.shared_entities = 150;
  s.data.seed = 9;
  s.char_budget = 3000;
  return s;
}

bool no_dangling(const UnifiedGraph& unified) {
  const auto& g = unified.graph();
  for (const auto& t : g.triples()) {
    if (!g.has_entity(t.head) || !g.has_entity(t.tail) ||
        !g.has_relation(t.relation)) {
      return false;
    }
  }
  for (const auto& [ref, id] : unified.entity_origins()) {
    if (!g.has_entity(id)) return false;
  }
  for (const auto& [ref, id] : unified.relation_origins()) {
    if (!g.has_relation(id)) return false;
  }
  return true;
}

// 4. Perfect oracle on one bilingual pair.
Outcome perfect_oracle() {
  const auto run = run_scenario(perfect_pair(), 4);
  const auto& g1 = run.bundle.graphs[0];
  const auto& g2 = run.bundle.graphs[1];
  const auto& unified = run.result.unified.graph();
  Checker c;
  c.expect(g1.triples().size() >= 570 && g2.triples().size() >= 570,
           "synthetic graphs are too small");
  c.expect(run.bundle.gold[0].size() == 150, "gold size");
  c.expect(run.report.score.precision == 1.0, "precision < 100%");
  c.expect(run.report.score.recall == 1.0, "recall < 100%");
  const std::size_t expected =
      g1.entities().size() + g2.entities().size() - 150;
  c.expect(unified.entities().size() == expected,
           fmt::format("{} canonical entities, want {}",
                       unified.entities().size(), expected));
  c.expect(no_dangling(run.result.unified), "dangling reference");
  return c.outcome(fmt::format(
      "|T1|={} |T2|={}, P={}% R={}%, {} canonical entities, 0 dangling",
      g1.triples().size(), g2.triples().size(),
      format_percent(run.report.score.precision),
      format_percent(run.report.score.recall), unified.entities().size()));
}

// 5. Noisy oracle: filtering raises precision at little recall cost.
Outcome noisy_oracle() {
  const auto run = run_scenario(noisy_pair(), 4);
  const auto& sweep = run.report.sweep;
  const auto at = [&](double tau) {
    for (const auto& row : sweep) {
      if (row.tau == tau) return row.score;
    }
    return Score{};
  };
  const auto s0 = at(0.0);
  const auto s90 = at(0.90);
  Checker c;
  c.expect(s0.predictions > 0 && s0.false_positives > 0,
           "noise produced no false positives");
  c.expect(s90.precision > s0.precision,
           fmt::format("P@0.90 {} <= P@0 {}", s90.precision, s0.precision));
  c.expect(100.0 * (s0.recall - s90.recall) <= 1.0,
           fmt::format("recall drop {:.2f} pt",
                       100.0 * (s0.recall - s90.recall)));
  std::string conf;
  if (run.report.confidence.true_positives &&
      run.report.confidence.false_positives) {
    conf = fmt::format(", mean sigma TP {:.3f} FP {:.3f}",
                       run.report.confidence.true_positives->mean,
                       run.report.confidence.false_positives->mean);
  }
  return c.outcome(fmt::format(
      "tau=0: P={}% R={}%; tau=0.90: P={}% R={}%{}",
      format_percent(s0.precision), format_percent(s0.recall),
      format_percent(s90.precision), format_percent(s90.recall), conf));
}

// 6. Salvage parsing of truncated responses.
struct FuzzItem {
  AlignmentKind kind;
  std::string source, target;
  double confidence;
};

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') {
      out += '\\';
      out += ch;
    } else if (ch == '\n') {
      out += "\\n";
    } else {
      out += ch;
    }
  }
  return out + "\"";
}

std::string random_label(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "Tokyo", "東京", "Café", "de", "{x}", "[1]", "a\"b", "c\\d", "line\nbreak",
      "Ω", " ", "_", "label", "},{", "]", "0.5"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::uniform_int_distribution<int> count(1, 4);
  std::string out = "L";
  for (int i = count(rng); i > 0; --i) out += pieces[pick(rng)];
  return out;
}

std::string random_space(std::mt19937_64& rng) {
  static const char* kSpaces[] = {"", " ", "\n", "\n  ", "\t"};
  return kSpaces[std::uniform_int_distribution<int>(0, 4)(rng)];
}

std::pair<std::string, std::vector<FuzzItem>> random_response(
    std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_items(0, 6);
  std::uniform_int_distribution<int> thousandths(0, 1000);
  std::vector<FuzzItem> items;
  std::vector<AlignmentKind> order = {AlignmentKind::kEntity,
                                      AlignmentKind::kRelation};
  if (rng() % 2) std::swap(order[0], order[1]);
  std::string body = "{" + random_space(rng);
  for (std::size_t a = 0; a < order.size(); ++a) {
    const auto kind = order[a];
    body += kind == AlignmentKind::kEntity ? "\"entity_alignments\""
                                           : "\"relation_alignments\"";
    body += ":" + random_space(rng) + "[";
    const int n = n_items(rng);
    for (int i = 0; i < n; ++i) {
      FuzzItem item{kind, random_label(rng), random_label(rng),
                    thousandths(rng) / 1000.0};
      if (i > 0) body += ",";
      body += random_space(rng);
      body += fmt::format(
          "{{\"source_label\":{}{},{}\"target_label\": {},\"confidence\": {}}}",
          random_space(rng), json_string(item.source), random_space(rng),
          json_string(item.target), item.confidence);
      items.push_back(std::move(item));
    }
    body += random_space(rng) + "]";
    if (a + 1 < order.size()) body += "," + random_space(rng);
  }
  body += random_space(rng) + "}";
  switch (rng() % 3) {
    case 0:
      return {body, items};
    case 1:
      return {"Here are the alignments:\n```json\n" + body + "\n```\n",
              items};
    default:
      return {"Result: " + body + " Let me know if you need more.", items};
  }
}

bool same_item(const ParsedItem& got, const FuzzItem& want) {
  return got.kind == want.kind && got.source_label == want.source &&
         got.target_label == want.target && got.confidence == want.confidence;
}

Outcome salvage_fuzz() {
  std::mt19937_64 rng(606);
  Checker c;
  std::size_t responses = 0, prefixes = 0, items_total = 0;
  for (; responses < 150; ++responses) {
    const auto [text, items] = random_response(rng);
    items_total += items.size();
    for (std::size_t cut = 0; cut <= text.size(); ++cut) {
      ++prefixes;
      try {
        const auto parsed = salvage_parse(std::string_view(text).substr(0, cut));
        bool prefix = parsed.items.size() <= items.size();
        for (std::size_t i = 0; prefix && i < parsed.items.size(); ++i) {
          prefix = same_item(parsed.items[i], items[i]);
        }
        c.expect(prefix, fmt::format("response {} cut {}: not a prefix",
                                     responses, cut));
        if (cut == text.size()) {
          c.expect(parsed.items.size() == items.size(),
                   fmt::format("response {}: full text lost items", responses));
        }
      } catch (const std::exception& e) {
        c.expect(false, fmt::format("response {} cut {}: threw {}", responses,
                                    cut, e.what()));
      }
    }
  }
  return c.outcome(fmt::format("{} responses, {} items, {} truncations",
                               responses, items_total, prefixes));
}

// 7. Partition invariants on random graphs.
Outcome partition_properties() {
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<std::size_t> budget(20, 400);
  Checker c;
  std::size_t batches_seen = 0;
  for (int round = 0; round < 1000; ++round) {
    const auto g = test_support::random_graph(rng, 1, 60, 6, 150, "n");
    const auto h = test_support::random_graph(rng, 2, 30, 4, 60, "m");
    const PartitionConfig config{budget(rng)};
    const auto source = partition(g, config);
    const auto target = partition(h, config);
    batches_seen += source.size();

    std::vector<Triple> covered;
    std::map<EntityId, std::set<std::size_t>> home;
    for (std::size_t b = 0; b < source.size(); ++b) {
      for (const auto& t : source[b].triples) {
        covered.push_back(t);
        home[t.head].insert(b);
      }
      if (!source[b].oversized) {
        std::size_t size = 0;
        for (const auto& t : source[b].triples) {
          size += linearize_triple(t, g).size() + 1;
        }
        c.expect(size <= config.char_budget,
                 fmt::format("round {}: batch over budget", round));
      }
    }
    std::sort(covered.begin(), covered.end());
    std::vector<Triple> all(g.triples().begin(), g.triples().end());
    std::sort(all.begin(), all.end());
    c.expect(covered == all,
             fmt::format("round {}: batches do not exactly cover", round));
    for (const auto& [head, where] : home) {
      c.expect(where.size() == 1,
               fmt::format("round {}: head {} split", round, head.value));
    }
    const auto pairs = pair_batches(source, target);
    std::set<std::pair<std::size_t, std::size_t>> distinct;
    for (const auto& p : pairs) distinct.insert({p.source_batch, p.target_batch});
    c.expect(pairs.size() == source.size() * target.size() &&
                 distinct.size() == pairs.size(),
             fmt::format("round {}: {} pairs for {}x{}", round, pairs.size(),
                         source.size(), target.size()));
  }
  return c.outcome(
      fmt::format("1000 graphs, {} source batches checked", batches_seen));
}

// 8. Aggregation against a brute-force scan.
Outcome aggregation_oracle() {
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<std::size_t> size(0, 1000);
  Checker c;
  std::size_t total = 0;
  for (int round = 0; round < 1000; ++round) {
    const std::size_t n = size(rng);
    const std::uint32_t sources = 1 + static_cast<std::uint32_t>(rng() % 80);
    std::vector<EntityPrediction> preds;
    std::vector<RelationPrediction> rels;
    for (std::size_t i = 0; i < n; ++i) {
      const EntityId s{static_cast<std::uint32_t>(rng() % sources)};
      const EntityId t{static_cast<std::uint32_t>(rng() % 40)};
      const double conf = static_cast<double>(rng() % 11) / 10.0;
      const std::size_t pair = rng() % 12;
      preds.push_back({s, t, conf, pair});
      if (i % 4 == 0) {
        rels.push_back({RelationId{s.value % 7}, RelationId{t.value % 5}, conf,
                        pair});
      }
    }
    total += n;

    // Brute force: best (confidence desc, pair asc, target asc) per source,
    // and per (source, target) the best confidence with its earliest pair.
    using Key = std::tuple<double, long long, long long>;
    auto key = [](double conf, std::size_t pair, EntityId t) {
      return Key{-conf, static_cast<long long>(pair),
                 static_cast<long long>(t.value)};
    };
    std::map<EntityId, Key> best;
    std::map<std::pair<EntityId, EntityId>, std::pair<double, std::size_t>>
        per_target;
    for (const auto& p : preds) {
      const auto k = key(p.confidence, p.pair_index, p.target);
      auto [it, fresh] = best.emplace(p.source, k);
      if (!fresh && k < it->second) it->second = k;
      auto [jt, new_target] = per_target.emplace(
          std::pair{p.source, p.target}, std::pair{p.confidence, p.pair_index});
      if (!new_target &&
          (p.confidence > jt->second.first ||
           (p.confidence == jt->second.first &&
            p.pair_index < jt->second.second))) {
        jt->second = {p.confidence, p.pair_index};
      }
    }
    std::map<EntityId, std::vector<Key>> ranked_ref;
    for (const auto& [st, v] : per_target) {
      ranked_ref[st.first].push_back(key(v.first, v.second, st.second));
    }
    for (auto& [s, list] : ranked_ref) std::sort(list.begin(), list.end());

    const auto table = aggregate_entities(preds);
    bool match = table.chosen.size() == best.size() &&
                 table.ranked.size() == ranked_ref.size();
    for (const auto& [s, k] : best) {
      auto it = table.chosen.find(s);
      match = match && it != table.chosen.end() &&
              key(it->second.confidence, it->second.pair_index,
                  it->second.target) == k;
    }
    for (const auto& [s, list] : ranked_ref) {
      auto it = table.ranked.find(s);
      if (it == table.ranked.end() || it->second.size() != list.size()) {
        match = false;
        continue;
      }
      for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& got = it->second[i];
        match = match &&
                key(got.confidence, got.pair_index, got.target) == list[i];
      }
    }
    c.expect(match, fmt::format("round {}: differs from brute force", round));

    const auto reference = aggregate(preds, rels);
    std::shuffle(preds.begin(), preds.end(), rng);
    std::shuffle(rels.begin(), rels.end(), rng);
    c.expect(aggregate(preds, rels) == reference,
             fmt::format("round {}: shuffle changed the result", round));
  }
  return c.outcome(
      fmt::format("1000 multisets, {} predictions, shuffle-invariant", total));
}

// 9. Rolling fusion of three graphs.
Outcome three_graph_fusion() {
  const auto run = run_scenario(perfect_triple(), 4);
  Checker c;
  c.expect(run.result.iterations.size() == 2,
           fmt::format("{} fusion steps", run.result.iterations.size()));
  const auto got = test_support::unified_entity_classes(run.result.unified);
  const auto want = test_support::gold_entity_classes(run.bundle);
  c.expect(got == want, fmt::format("{} clusters, gold closure has {}",
                                    got.size(), want.size()));
  c.expect(no_dangling(run.result.unified), "dangling reference");
  return c.outcome(fmt::format("2 fusion steps, {} clusters equal the gold "
                               "closure",
                               got.size()));
}

// 10. Worker count does not change any report byte.
Outcome determinism() {
  Checker c;
  const std::vector<std::pair<const char*, Scenario>> scenarios = {
      {"perfect", perfect_pair()},
      {"noisy", noisy_pair()},
      {"three-graph", perfect_triple()}};
  for (const auto& [name, scenario] : scenarios) {
    const auto reference = run_scenario(scenario, 1).bytes;
    for (std::size_t workers : {4u, 8u}) {
      c.expect(run_scenario(scenario, workers).bytes == reference,
               fmt::format("{} differs with {} workers", name, workers));
    }
  }
  return c.outcome("criteria 4, 5, 9 byte-identical with 1, 4, 8 workers");
}

struct Criterion {
  int number;
  const char* name;
  std::chrono::milliseconds limit;
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace kgfuse::acceptance

int main() {
  using namespace kgfuse::acceptance;
  using std::chrono::milliseconds;
  spdlog::set_level(spdlog::level::warn);
  const std::vector<Criterion> criteria = {
      {1, "headline precision/recall/F1", milliseconds(1000), headline_counts},
      {2, "threshold sweep rows", milliseconds(1000), threshold_rows},
      {3, "Hits@k rows", milliseconds(1000), hits_rows},
      {4, "perfect oracle end to end", milliseconds(60000), perfect_oracle},
      {5, "noisy oracle threshold behavior", milliseconds(120000),
       noisy_oracle},
      {6, "salvage parsing fuzz", milliseconds(60000), salvage_fuzz},
      {7, "partition properties", milliseconds(60000), partition_properties},
      {8, "aggregation oracle", milliseconds(60000), aggregation_oracle},
      {9, "three-graph rolling fusion", milliseconds(60000),
       three_graph_fusion},
      {10, "determinism across worker counts", milliseconds(600000),
       determinism},
  };
  int failed = 0;
  for (const auto& criterion : criteria) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = criterion.check();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("threw: {}", e.what())};
    }
    const auto elapsed =
        std::chrono::duration_cast<milliseconds>(Clock::now() - start);
    if (outcome.pass && elapsed > criterion.limit) {
      outcome = {false, fmt::format("took {} ms, limit {} ms", elapsed.count(),
                                    criterion.limit.count())};
    }
    if (!outcome.pass) ++failed;
    fmt::print("{} criterion {}: {} ({} ms): {}\n",
               outcome.pass ? "PASS" : "FAIL", criterion.number,
               criterion.name, elapsed.count(), outcome.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed,
             criteria.size());
  return failed == 0 ? 0 : 1;
}
