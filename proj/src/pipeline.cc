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

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "kgfuse/response_cache.h"

namespace kgfuse {
namespace {

using nlohmann::json;

constexpr std::string_view kStateFormat = "kgfuse-state-v1";
constexpr std::string_view kLedgerFormat = "kgfuse-pair-ledger-v1";

std::filesystem::path ledger_path(const std::filesystem::path& dir,
                                  int iteration) {
  return dir / fmt::format("pairs_iter_{}.jsonl", iteration);
}

std::filesystem::path state_path(const std::filesystem::path& dir) {
  return dir / "state.json";
}

// Append-only record of answered batch pairs for one iteration.
class PairLedger {
 public:
  PairLedger(const std::filesystem::path& path, const json& header) {
    bool have_header = false;
    if (std::ifstream in(path); in) {
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (record.is_discarded() || !record.is_object()) {
          // A torn final line from an interrupted write.
          spdlog::warn("{}:{}: skipping unreadable ledger line",
                       path.string(), lineno);
          continue;
        }
        if (!have_header) {
          if (record != header) {
            throw ConfigError(fmt::format(
                "{} was written for a different configuration ({}); use a "
                "fresh checkpoint directory",
                path.string(), record.dump()));
          }
          have_header = true;
          continue;
        }
        if (record.value("status", "") == "succeeded") {
          answered_[record.at("pair_index").get<std::size_t>()] = Answer{
              record.at("prompt").get<std::string>(),
              record.at("text").get<std::string>()};
        }
      }
    }
    out_.open(path, std::ios::app);
    if (!out_) throw DataError(fmt::format("cannot write {}", path.string()));
    // Terminates a torn line, if any; blank lines are skipped on load.
    out_ << '\n';
    if (!have_header) out_ << header.dump() << '\n';
    out_.flush();
  }

  std::size_t answered_count() const { return answered_.size(); }

  // Text of an earlier answer to the same prompt.
  std::optional<std::string> find(std::size_t pair_index,
                                  const std::string& prompt_digest) const {
    auto it = answered_.find(pair_index);
    if (it == answered_.end() || it->second.prompt != prompt_digest) {
      return std::nullopt;
    }
    return it->second.text;
  }

  void record(const json& entry) {
    std::lock_guard lock(mu_);
    out_ << entry.dump() << '\n';
    out_.flush();
  }

 private:
  struct Answer {
    std::string prompt;
    std::string text;
  };

  std::map<std::size_t, Answer> answered_;
  std::mutex mu_;
  std::ofstream out_;
};

// ---- State snapshot -------------------------------------------------------

json labels_to_json(const LabelSet& labels) {
  json out = json::array();
  for (const auto& l : labels) out.push_back({l.lang, l.text});
  return out;
}

LabelSet labels_from_json(const json& j) {
  LabelSet out;
  for (const auto& l : j) {
    out.push_back(Label{l.at(1).get<std::string>(), l.at(0).get<std::string>()});
  }
  return out;
}

template <typename Id>
json nodes_to_json(const std::map<Id, LabelSet>& nodes) {
  json out = json::array();
  for (const auto& [id, labels] : nodes) {
    out.push_back({id.value, labels_to_json(labels)});
  }
  return out;
}

template <typename Id>
std::map<Id, LabelSet> nodes_from_json(const json& j) {
  std::map<Id, LabelSet> out;
  for (const auto& n : j) {
    out.emplace(Id{n.at(0).get<std::uint32_t>()}, labels_from_json(n.at(1)));
  }
  return out;
}

template <typename Id>
json origins_to_json(const std::map<ScopedRef<Id>, Id>& origins) {
  json out = json::array();
  for (const auto& [ref, id] : origins) {
    out.push_back({ref.graph.value, ref.id.value, id.value});
  }
  return out;
}

template <typename Id>
std::map<ScopedRef<Id>, Id> origins_from_json(const json& j) {
  std::map<ScopedRef<Id>, Id> out;
  for (const auto& o : j) {
    out.emplace(ScopedRef<Id>{GraphId{o.at(0).get<std::uint32_t>()},
                              Id{o.at(1).get<std::uint32_t>()}},
                Id{o.at(2).get<std::uint32_t>()});
  }
  return out;
}

json unified_to_json(const UnifiedGraph& u) {
  const auto& g = u.graph();
  json triples = json::array();
  for (const auto& t : g.triples()) {
    triples.push_back({t.head.value, t.relation.value, t.tail.value});
  }
  json members = json::array();
  for (auto m : u.members()) members.push_back(m.value);
  json merges = json::array();
  for (const auto& m : u.merges()) {
    merges.push_back({m.iteration, to_string(m.kind), m.canonical,
                      m.graph.value, m.original, m.confidence, m.conflict});
  }
  return json{{"lang", g.lang()},
              {"entities", nodes_to_json(g.entities())},
              {"relations", nodes_to_json(g.relations())},
              {"triples", std::move(triples)},
              {"members", std::move(members)},
              {"entity_origins", origins_to_json(u.entity_origins())},
              {"relation_origins", origins_to_json(u.relation_origins())},
              {"merges", std::move(merges)}};
}

UnifiedGraph unified_from_json(const json& j) {
  std::vector<Triple> triples;
  for (const auto& t : j.at("triples")) {
    triples.push_back(Triple{EntityId{t.at(0).get<std::uint32_t>()},
                             RelationId{t.at(1).get<std::uint32_t>()},
                             EntityId{t.at(2).get<std::uint32_t>()}});
  }
  auto graph = build_graph(kUnifiedGraphId, j.at("lang").get<std::string>(),
                           nodes_from_json<EntityId>(j.at("entities")),
                           nodes_from_json<RelationId>(j.at("relations")),
                           triples);
  std::vector<GraphId> members;
  for (const auto& m : j.at("members")) {
    members.push_back(GraphId{m.get<std::uint32_t>()});
  }
  std::vector<MergeRecord> merges;
  for (const auto& m : j.at("merges")) {
    merges.push_back(MergeRecord{
        m.at(0).get<int>(),
        m.at(1).get<std::string>() == "relation" ? AlignmentKind::kRelation
                                                 : AlignmentKind::kEntity,
        m.at(2).get<std::uint32_t>(), GraphId{m.at(3).get<std::uint32_t>()},
        m.at(4).get<std::uint32_t>(), m.at(5).get<double>(),
        m.at(6).get<bool>()});
  }
  return UnifiedGraph::restore(
      std::move(graph), std::move(members),
      origins_from_json<EntityId>(j.at("entity_origins")),
      origins_from_json<RelationId>(j.at("relation_origins")),
      std::move(merges));
}

template <typename Id>
json candidate_to_json(const Candidate<Id>& c) {
  return json{c.target.value, c.confidence, c.pair_index};
}

template <typename Id>
Candidate<Id> candidate_from_json(const json& j) {
  return Candidate<Id>{Id{j.at(0).get<std::uint32_t>()}, j.at(1).get<double>(),
                       j.at(2).get<std::size_t>()};
}

template <typename Id>
json table_to_json(const AlignmentTable<Id>& table) {
  json ranked = json::array();
  for (const auto& [source, list] : table.ranked) {
    json items = json::array();
    for (const auto& c : list) items.push_back(candidate_to_json(c));
    ranked.push_back({source.value, std::move(items)});
  }
  json chosen = json::array();
  for (const auto& [source, c] : table.chosen) {
    chosen.push_back({source.value, candidate_to_json(c)});
  }
  return json{{"ranked", std::move(ranked)}, {"chosen", std::move(chosen)}};
}

template <typename Id>
AlignmentTable<Id> table_from_json(const json& j) {
  AlignmentTable<Id> table;
  for (const auto& r : j.at("ranked")) {
    auto& list = table.ranked[Id{r.at(0).get<std::uint32_t>()}];
    for (const auto& c : r.at(1)) list.push_back(candidate_from_json<Id>(c));
  }
  for (const auto& c : j.at("chosen")) {
    table.chosen.emplace(Id{c.at(0).get<std::uint32_t>()},
                         candidate_from_json<Id>(c.at(1)));
  }
  return table;
}

json graph_ids_json(std::span<const KnowledgeGraph> graphs) {
  json ids = json::array();
  for (const auto& g : graphs) ids.push_back(g.id().value);
  return ids;
}

json settings_json(const PipelineConfig& config) {
  return json{{"char_budget", config.partition.char_budget},
              {"tau", config.tau},
              {"bijective", config.aggregate.bijective}};
}

void save_state(const std::filesystem::path& dir,
                std::span<const KnowledgeGraph> graphs,
                const PipelineConfig& config, const PipelineResult& result) {
  json iterations = json::array();
  for (const auto& r : result.iterations) {
    json sources = json::array();
    for (auto g : r.source_graphs) sources.push_back(g.value);
    iterations.push_back(
        {{"iteration", r.iteration},
         {"source_graphs", std::move(sources)},
         {"incoming", r.incoming.value},
         {"source_batches", r.source_batches},
         {"target_batches", r.target_batches},
         {"entities", table_to_json(r.aggregated.entities)},
         {"relations", table_to_json(r.aggregated.relations)}});
  }
  const json state{
      {"format", kStateFormat},
      {"graph_ids", graph_ids_json(graphs)},
      {"settings", settings_json(config)},
      {"completed_iteration", result.iterations.back().iteration},
      {"iterations", std::move(iterations)},
      {"unified", unified_to_json(result.unified)}};

  const auto path = state_path(dir);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << state.dump() << '\n';
    out.flush();
    if (!out) throw DataError(fmt::format("cannot write {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

std::optional<json> read_state(const std::filesystem::path& dir) {
  const auto path = state_path(dir);
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path);
  json state = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (state.is_discarded() || !state.is_object() ||
      state.value("format", "") != kStateFormat) {
    throw DataError(fmt::format("{} is not a kgfuse checkpoint", path.string()));
  }
  return state;
}

std::optional<PipelineResult> load_state(const std::filesystem::path& dir,
                                         std::span<const KnowledgeGraph> graphs,
                                         const PipelineConfig& config) {
  auto loaded = read_state(dir);
  if (!loaded) return std::nullopt;
  const json& state = *loaded;
  const auto path = state_path(dir);
  if (state.at("graph_ids") != graph_ids_json(graphs) ||
      state.at("settings") != settings_json(config)) {
    throw ConfigError(fmt::format(
        "{} belongs to a run with different graphs or settings; use a fresh "
        "checkpoint directory",
        path.string()));
  }
  try {
    PipelineResult result;
    result.unified = unified_from_json(state.at("unified"));
    for (const auto& r : state.at("iterations")) {
      IterationReport report;
      report.iteration = r.at("iteration").get<int>();
      for (const auto& g : r.at("source_graphs")) {
        report.source_graphs.push_back(GraphId{g.get<std::uint32_t>()});
      }
      report.incoming = GraphId{r.at("incoming").get<std::uint32_t>()};
      report.source_batches = r.at("source_batches").get<std::size_t>();
      report.target_batches = r.at("target_batches").get<std::size_t>();
      report.aggregated.entities =
          table_from_json<EntityId>(r.at("entities"));
      report.aggregated.relations =
          table_from_json<RelationId>(r.at("relations"));
      report.accepted = filter_threshold(report.aggregated, config.tau);
      report.restored = true;
      result.iterations.push_back(std::move(report));
    }
    return result;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace

std::string_view to_string(PairStatus status) {
  switch (status) {
    case PairStatus::kSucceeded:
      return "succeeded";
    case PairStatus::kFailed:
      return "failed";
    case PairStatus::kSkippedCached:
      return "skipped-cached";
  }
  return "unknown";
}

void validate(const PipelineConfig& config) {
  if (config.partition.char_budget == 0) {
    throw ConfigError("char_budget must be positive");
  }
  if (!(config.tau >= 0.0 && config.tau <= 1.0)) {
    throw ConfigError("tau must lie in [0, 1]");
  }
  if (config.workers < 1) throw ConfigError("workers must be at least 1");
  if (config.temperature < 0.0) throw ConfigError("temperature must be >= 0");
  validate_prompt_template(config.prompts);
}

std::size_t IterationReport::count(PairStatus status) const {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(),
                    [&](const PairOutcome& p) { return p.status == status; }));
}

IterationReport align_iteration(const UnifiedGraph& unified,
                                const KnowledgeGraph& incoming,
                                AlignmentBackend& backend,
                                const PipelineConfig& config, int iteration) {
  validate(config);
  const auto& source = unified.graph();
  const auto source_batches = partition(source, config.partition);
  const auto target_batches = partition(incoming, config.partition);
  const auto pairs = pair_batches(source_batches, target_batches);
  const auto source_index = build_label_index(source);
  const auto target_index = build_label_index(incoming);

  IterationReport report;
  report.iteration = iteration;
  report.source_graphs = unified.members();
  report.incoming = incoming.id();
  report.source_batches = source_batches.size();
  report.target_batches = target_batches.size();
  report.pairs.resize(pairs.size());
  spdlog::info("iteration {}: graph {} against {} graph(s): {} x {} = {} "
               "batch pairs",
               iteration, incoming.id().value, unified.members().size(),
               source_batches.size(), target_batches.size(), pairs.size());

  std::optional<PairLedger> ledger;
  if (config.checkpoint_dir) {
    std::filesystem::create_directories(*config.checkpoint_dir);
    const json header{{"format", kLedgerFormat},
                      {"iteration", iteration},
                      {"incoming", incoming.id().value},
                      {"k", source_batches.size()},
                      {"k_prime", target_batches.size()},
                      {"settings", settings_json(config)}};
    ledger.emplace(ledger_path(*config.checkpoint_dir, iteration), header);
    if (ledger->answered_count() > 0) {
      spdlog::info("iteration {}: {} batch pair(s) already answered in the "
                   "ledger",
                   iteration, ledger->answered_count());
    }
  }

  std::vector<ResolveResult> resolved(pairs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mu;
  std::exception_ptr first_error;

  auto process = [&](std::size_t i) {
    const auto& pair = pairs[i];
    auto& outcome = report.pairs[i];
    outcome.pair_index = pair.pair_index;
    outcome.source_batch = pair.source_batch;
    outcome.target_batch = pair.target_batch;

    PromptMeta meta{pair.pair_index, iteration,        unified.members(),
                    incoming.id(),   config.model_name, config.temperature};
    const Prompt prompt = build_prompt(
        source_batches[pair.source_batch], source,
        target_batches[pair.target_batch], incoming, config.prompts,
        config.tau, std::move(meta));
    const std::string digest =
        sha256_hex(prompt.system + '\x1f' + prompt.user);

    std::string text;
    std::optional<std::string> reused;
    if (ledger) reused = ledger->find(pair.pair_index, digest);
    if (reused) {
      text = std::move(*reused);
      outcome.status = PairStatus::kSkippedCached;
    } else {
      try {
        RawResponse response = backend.submit(prompt);
        text = std::move(response.text);
        outcome.status = response.cache_hit ? PairStatus::kSkippedCached
                                            : PairStatus::kSucceeded;
      } catch (const BackendError& e) {
        if (e.fatal()) throw;
        outcome.status = PairStatus::kFailed;
        outcome.error = e.what();
        if (ledger) {
          ledger->record({{"pair_index", pair.pair_index},
                          {"status", "failed"},
                          {"prompt", digest},
                          {"error", outcome.error}});
        }
        spdlog::warn("iteration {} pair {}/{}: failed: {}", iteration,
                     pair.pair_index + 1, pairs.size(), outcome.error);
        return;
      }
      if (ledger) {
        ledger->record({{"pair_index", pair.pair_index},
                        {"status", "succeeded"},
                        {"prompt", digest},
                        {"text", text}});
      }
    }

    const auto parsed = salvage_parse(text);
    resolved[i] =
        resolve(parsed.items, source_index, target_index, pair.pair_index);
    outcome.diagnostics = parsed.diagnostics;
    outcome.parsed_items = parsed.items.size();
    outcome.entity_predictions = resolved[i].entities.size();
    outcome.relation_predictions = resolved[i].relations.size();
    outcome.dropped = resolved[i].dropped;
    outcome.ambiguous = resolved[i].ambiguous;
    spdlog::info("iteration {} pair {}/{} [{}]: parsed {} (fragments {}, "
                 "malformed {}), resolved {} entity / {} relation, dropped "
                 "{}, ambiguous {}",
                 iteration, pair.pair_index + 1, pairs.size(),
                 to_string(outcome.status), outcome.parsed_items,
                 outcome.diagnostics.dropped_fragments,
                 outcome.diagnostics.malformed_items,
                 outcome.entity_predictions, outcome.relation_predictions,
                 outcome.dropped, outcome.ambiguous);
  };

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pairs.size()) return;
      try {
        process(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        stop.store(true);
        return;
      }
    }
  };

  {
    const std::size_t n =
        std::max<std::size_t>(1, std::min(config.workers, pairs.size()));
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(worker);
  }

  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const BackendError& e) {
      throw PipelineAborted(
          fmt::format("iteration {}: fatal backend error: {}", iteration,
                      e.what()),
          iteration);
    }
  }

  std::vector<EntityPrediction> entities;
  std::vector<RelationPrediction> relations;
  for (auto& r : resolved) {
    entities.insert(entities.end(), r.entities.begin(), r.entities.end());
    relations.insert(relations.end(), r.relations.begin(), r.relations.end());
  }
  report.aggregated = aggregate(entities, relations, config.aggregate);
  report.accepted = filter_threshold(report.aggregated, config.tau);
  spdlog::info("iteration {}: {} succeeded, {} failed, {} skipped-cached; "
               "{} entity / {} relation alignments, {} / {} at tau {:.2f}",
               iteration, report.count(PairStatus::kSucceeded),
               report.count(PairStatus::kFailed),
               report.count(PairStatus::kSkippedCached),
               report.aggregated.entities.chosen.size(),
               report.aggregated.relations.chosen.size(),
               report.accepted.entities.chosen.size(),
               report.accepted.relations.chosen.size(), config.tau);
  return report;
}

PipelineResult run_pipeline(std::span<const KnowledgeGraph> graphs,
                            AlignmentBackend& backend,
                            const PipelineConfig& config) {
  validate(config);
  if (graphs.size() < 2) {
    throw ConfigError("fusion needs at least two graphs");
  }
  std::set<GraphId> ids;
  for (const auto& g : graphs) {
    if (g.id() == kUnifiedGraphId || !ids.insert(g.id()).second) {
      throw ConfigError(fmt::format(
          "graph ids must be distinct and nonzero (got {})", g.id().value));
    }
  }

  PipelineResult result;
  int start = 2;
  if (config.checkpoint_dir) {
    std::filesystem::create_directories(*config.checkpoint_dir);
    if (auto restored = load_state(*config.checkpoint_dir, graphs, config)) {
      result = std::move(*restored);
      start = result.iterations.empty() ? 2
                                        : result.iterations.back().iteration + 1;
      spdlog::info("resuming from checkpoint after iteration {}", start - 1);
    }
  }
  if (start == 2) result.unified = UnifiedGraph::from_graph(graphs[0]);

  const int n = static_cast<int>(graphs.size());
  for (int t = start; t <= n; ++t) {
    const auto& incoming = graphs[static_cast<std::size_t>(t - 1)];
    auto report = align_iteration(result.unified, incoming, backend, config, t);
    if (config.on_aligned) config.on_aligned(report);
    result.unified = fuse_step(result.unified, incoming, report.accepted, t);
    spdlog::info("iteration {}: unified graph has {} entities, {} relations, "
                 "{} triples",
                 t, result.unified.graph().entities().size(),
                 result.unified.graph().relations().size(),
                 result.unified.graph().triples().size());
    result.iterations.push_back(std::move(report));
    if (config.checkpoint_dir) {
      save_state(*config.checkpoint_dir, graphs, config, result);
    }
  }
  return result;
}

namespace {

// Characters a batch adds to a prompt beyond the empty-batch overhead: its
// block without the final newline, plus the extra digits of its count.
std::size_t occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto i = text.find(needle); i != std::string_view::npos;
       i = text.find(needle, i + needle.size())) {
    ++n;
  }
  return n;
}

// Characters a batch adds to a prompt beyond the empty-batch overhead.
// `count_slots` is how often its triple count is spelled out.
std::size_t prompt_share(const Batch& b, std::size_t count_slots) {
  const std::size_t block = b.triples.empty() ? 0 : b.linearized_size - 1;
  return block + count_slots * (std::to_string(b.triples.size()).size() - 1);
}

}  // namespace

std::vector<IterationPlan> estimate_plan(std::span<const KnowledgeGraph> graphs,
                                         const PipelineConfig& config) {
  validate(config);
  std::vector<IterationPlan> plans;
  if (graphs.empty()) return plans;
  const std::size_t overhead = prompt_overhead(config.prompts, config.tau);
  const std::size_t source_slots =
      occurrences(config.prompts.user, "{{source_count}}");
  const std::size_t target_slots =
      occurrences(config.prompts.user, "{{target_count}}");
  auto unified = UnifiedGraph::from_graph(graphs[0]);
  for (std::size_t i = 1; i < graphs.size(); ++i) {
    const int t = static_cast<int>(i + 1);
    const auto source = partition(unified.graph(), config.partition);
    const auto target = partition(graphs[i], config.partition);
    std::size_t source_share = 0;
    std::size_t target_share = 0;
    IterationPlan plan;
    plan.iteration = t;
    for (const auto& b : source) {
      source_share += prompt_share(b, source_slots);
      plan.oversized_batches += b.oversized ? 1 : 0;
    }
    for (const auto& b : target) {
      target_share += prompt_share(b, target_slots);
      plan.oversized_batches += b.oversized ? 1 : 0;
    }
    plan.source_batches = source.size();
    plan.target_batches = target.size();
    plan.pairs = source.size() * target.size();
    plan.prompt_chars = plan.pairs * overhead + target.size() * source_share +
                        source.size() * target_share;
    plans.push_back(plan);
    if (i + 1 < graphs.size()) {
      unified = fuse_step(unified, graphs[i], AlignmentSet{}, t);
    }
  }
  return plans;
}

std::optional<UnifiedGraph> load_checkpoint_unified(
    const std::filesystem::path& checkpoint_dir) {
  auto state = read_state(checkpoint_dir);
  if (!state) return std::nullopt;
  try {
    return unified_from_json(state->at("unified"));
  } catch (const json::exception& e) {
    throw DataError(fmt::format("{}: {}", state_path(checkpoint_dir).string(),
                                e.what()));
  }
}

}  // namespace kgfuse
