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

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "kgfuse/dump.h"
#include "kgfuse/errors.h"
#include "kgfuse/eval.h"
#include "kgfuse/fusion.h"
#include "kgfuse/http_backend.h"
#include "kgfuse/oracle_backend.h"
#include "kgfuse/response_cache.h"
#include "kgfuse/text_util.h"
#include "run_config.h"

namespace kgfuse::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string dashed(std::string_view key) {
  std::string out(key);
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

// Raw values of every config flag given on the command line.
struct FlagValues {
  std::string config_file;
  std::map<std::string, std::vector<std::string>> values;
  std::map<std::string, bool> bools;
  std::map<std::string, CLI::Option*> bool_options;
};

void add_config_flags(CLI::App& cmd, FlagValues& flags) {
  cmd.add_option("--config", flags.config_file, "JSON configuration file");
  for (const auto& field : config_fields()) {
    const std::string key(field.key);
    const std::string help(field.help);
    if (field.type == FieldType::kBool) {
      flags.bool_options[key] = cmd.add_flag(
          fmt::format("--{0},!--no-{0}", dashed(key)), flags.bools[key], help);
    } else {
      auto* opt = cmd.add_option("--" + dashed(key), flags.values[key], help);
      const bool list = field.type == FieldType::kPathList ||
                        field.type == FieldType::kPairFileList ||
                        field.type == FieldType::kUIntList;
      if (!list) opt->expected(1);
    }
  }
}

RunConfig resolve_config(const FlagValues& flags) {
  RunConfig config;
  if (!flags.config_file.empty()) config = load_config_file(flags.config_file);
  json overrides = json::object();
  for (const auto& field : config_fields()) {
    const std::string key(field.key);
    if (field.type == FieldType::kBool) {
      if (flags.bool_options.at(key)->count() > 0) {
        overrides[key] = flags.bools.at(key);
      }
      continue;
    }
    const auto& v = flags.values.at(key);
    if (!v.empty()) overrides[key] = flag_value_to_json(field, v);
  }
  config = config_from_json(overrides, {}, std::move(config));
  validate(config);
  return config;
}

void configure_logging(const RunConfig& config) {
  auto logger = spdlog::get("kgfuse");
  if (!logger) logger = spdlog::stderr_color_mt("kgfuse");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(config.log_level));
}

// Owns the backend chain: base backend, optional response cache on top.
class BackendStack {
 public:
  BackendStack(const RunConfig& config, const DatasetBundle& bundle) {
    if (config.backend.kind == BackendKind::kOracle) {
      base_ = std::make_unique<OracleBackend>(oracle_config(config, bundle),
                                              bundle.graphs);
    } else {
      if (!std::getenv(config.backend.api_key_env.c_str())) {
        spdlog::warn("{} is not set; requests carry no credentials",
                     config.backend.api_key_env);
      }
      limiter_ = std::make_unique<RateLimiter>(
          config.backend.requests_per_minute, std::chrono::minutes(1),
          system_clock());
      base_ = std::make_unique<HttpLlmBackend>(config.backend, *limiter_);
    }
    if (config.cache_dir) {
      fs::create_directories(*config.cache_dir);
      cache_ = std::make_unique<ResponseCache>(*config.cache_dir /
                                               "responses.jsonl");
      if (cache_->skipped_lines() > 0) {
        spdlog::warn("response cache: skipped {} unreadable line(s)",
                     cache_->skipped_lines());
      }
      caching_ =
          std::make_unique<CachingBackend>(*base_, *cache_, config.backend);
    }
  }

  AlignmentBackend& backend() {
    return caching_ ? static_cast<AlignmentBackend&>(*caching_) : *base_;
  }

  void log_cache_stats() const {
    if (caching_) {
      spdlog::info("response cache: {} hit(s), {} miss(es)", caching_->hits(),
                   caching_->misses());
    }
  }

 private:
  std::unique_ptr<RateLimiter> limiter_;
  std::unique_ptr<AlignmentBackend> base_;
  std::unique_ptr<ResponseCache> cache_;
  std::unique_ptr<CachingBackend> caching_;
};

AlignmentDump to_dump(const IterationReport& report) {
  return AlignmentDump{report.iteration, report.source_graphs, report.incoming,
                       report.aggregated};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
}

void require_two_graphs(const DatasetBundle& bundle) {
  if (bundle.graphs.size() < 2) {
    throw ConfigError(fmt::format("need at least two graphs, got {}",
                                  bundle.graphs.size()));
  }
}

// Writes report.csv and report.txt and echoes the text table to `out`.
void emit_report(const RunConfig& config, const AlignmentTable<EntityId>& table,
                 const GoldAlignment& gold, std::ostream& out) {
  const auto report = evaluate(table, gold, config.tau);
  std::ostringstream csv;
  write_report_csv(report, csv);
  std::ostringstream text;
  write_report_text(report, text);
  write_file(config.output_dir / "report.csv", csv.str());
  write_file(config.output_dir / "report.txt", text.str());
  out << text.str();
}

void report_if_gold(const RunConfig& config, const DatasetBundle& bundle,
                    const IterationReport& first, std::ostream& out) {
  const auto* gold =
      bundle.find_gold(first.source_graphs.front(), first.incoming);
  if (!gold) {
    spdlog::info("no gold alignment for graphs {} -> {}; skipping evaluation",
                 first.source_graphs.front().value, first.incoming.value);
    return;
  }
  emit_report(config, first.aggregated.entities, *gold, out);
}

void print_pair_summary(const IterationReport& r, std::ostream& out) {
  if (r.restored) {
    out << fmt::format("iteration {}: restored from checkpoint\n", r.iteration);
    return;
  }
  out << fmt::format(
      "iteration {}: {} x {} = {} batch pairs ({} succeeded, {} failed, {} "
      "skipped-cached); {} entity and {} relation alignments accepted\n",
      r.iteration, r.source_batches, r.target_batches, r.pairs.size(),
      r.count(PairStatus::kSucceeded), r.count(PairStatus::kFailed),
      r.count(PairStatus::kSkippedCached), r.accepted.entities.chosen.size(),
      r.accepted.relations.chosen.size());
}

int cmd_fuse(const RunConfig& config, std::ostream& out) {
  const auto bundle = load_dataset(config);
  require_two_graphs(bundle);
  fs::create_directories(config.output_dir);
  write_file(config.output_dir / "run_config.json",
             config_to_json(config).dump(2) + "\n");

  BackendStack stack(config, bundle);
  auto pipeline = pipeline_config(config);
  pipeline.on_aligned = [&](const IterationReport& r) {
    save_dump(to_dump(r), dump_path(config.output_dir, r.iteration));
  };
  const auto result = run_pipeline(bundle.graphs, stack.backend(), pipeline);
  stack.log_cache_stats();

  save_generic(result.unified.graph(), config.output_dir / "unified.kg");
  save_provenance(result.unified, config.output_dir / "provenance.tsv");
  for (const auto& r : result.iterations) print_pair_summary(r, out);
  const auto& g = result.unified.graph();
  out << fmt::format("unified graph: {} entities, {} relations, {} triples\n",
                     g.entities().size(), g.relations().size(),
                     g.triples().size());
  report_if_gold(config, bundle, result.iterations.front(), out);
  return kExitOk;
}

int cmd_align(const RunConfig& config, std::ostream& out) {
  const auto bundle = load_dataset(config);
  require_two_graphs(bundle);
  fs::create_directories(config.output_dir);
  BackendStack stack(config, bundle);
  const auto unified = UnifiedGraph::from_graph(bundle.graphs[0]);
  const auto report = align_iteration(unified, bundle.graphs[1],
                                      stack.backend(), pipeline_config(config),
                                      /*iteration=*/2);
  stack.log_cache_stats();
  save_dump(to_dump(report), dump_path(config.output_dir, 2));
  print_pair_summary(report, out);
  report_if_gold(config, bundle, report, out);
  return kExitOk;
}

struct DumpAndGold {
  AlignmentDump dump;
  GoldAlignment gold;
};

DumpAndGold load_dump_and_gold(const RunConfig& config,
                               const std::string& dump_flag) {
  const fs::path path =
      dump_flag.empty() ? dump_path(config.output_dir, 2) : fs::path(dump_flag);
  if (!fs::exists(path)) {
    throw ConfigError(
        fmt::format("alignment dump does not exist: {}", path.string()));
  }
  auto dump = load_dump(path);
  if (dump.source_graphs.size() != 1) {
    throw ConfigError(fmt::format(
        "{} aligns against {} fused graphs; evaluation needs a dump from the "
        "first iteration",
        path.string(), dump.source_graphs.size()));
  }
  const auto bundle = load_dataset(config);
  const auto* gold = bundle.find_gold(dump.source_graphs.front(), dump.incoming);
  if (!gold) {
    throw ConfigError(fmt::format("no gold alignment for graphs {} -> {}",
                                  dump.source_graphs.front().value,
                                  dump.incoming.value));
  }
  return DumpAndGold{std::move(dump), *gold};
}

int cmd_eval(const RunConfig& config, const std::string& dump_flag,
             std::ostream& out) {
  const auto loaded = load_dump_and_gold(config, dump_flag);
  fs::create_directories(config.output_dir);
  emit_report(config, loaded.dump.aggregated.entities, loaded.gold, out);
  return kExitOk;
}

std::vector<double> parse_taus(const std::vector<std::string>& values,
                               bool given) {
  if (!given) {
    return std::vector<double>(std::begin(kDefaultSweepTaus),
                               std::end(kDefaultSweepTaus));
  }
  std::vector<double> taus;
  for (const auto& v : values) {
    for (auto part : split_tabs(replace_all(v, ",", "\t"))) {
      if (part.empty()) continue;
      const auto tau = parse_double(part);
      if (!tau || *tau < 0.0 || *tau > 1.0) {
        throw ConfigError(fmt::format("bad tau '{}'", part));
      }
      taus.push_back(*tau);
    }
  }
  if (taus.empty()) throw ConfigError("the tau list is empty");
  return taus;
}

int cmd_sweep(const RunConfig& config, const std::string& dump_flag,
              const std::vector<double>& taus, std::ostream& out) {
  const auto loaded = load_dump_and_gold(config, dump_flag);
  const auto rows =
      threshold_sweep(loaded.dump.aggregated.entities, loaded.gold, taus);
  fs::create_directories(config.output_dir);
  std::ostringstream csv;
  write_sweep_csv(rows, csv);
  write_file(config.output_dir / "sweep.csv", csv.str());
  write_sweep_text(rows, out);
  return kExitOk;
}

int cmd_estimate(const RunConfig& config, std::ostream& out) {
  const auto bundle = load_dataset(config);
  require_two_graphs(bundle);
  std::size_t total_pairs = 0;
  std::size_t total_chars = 0;
  for (const auto& plan : estimate_plan(bundle.graphs, pipeline_config(config))) {
    out << fmt::format(
        "iteration {}: k={} k'={} -> {} batch pairs, {} prompt characters{}\n",
        plan.iteration, plan.source_batches, plan.target_batches, plan.pairs,
        plan.prompt_chars,
        plan.oversized_batches > 0
            ? fmt::format(" ({} oversized batches)", plan.oversized_batches)
            : std::string());
    total_pairs += plan.pairs;
    total_chars += plan.prompt_chars;
  }
  const double minutes = static_cast<double>(total_pairs) /
                         config.backend.requests_per_minute;
  out << fmt::format("total: {} batch pairs, {} prompt characters\n",
                     total_pairs, total_chars);
  out << fmt::format(
      "projected wall time at {} requests/min: {:.1f} min ({:.2f} h)\n",
      config.backend.requests_per_minute, minutes, minutes / 60.0);
  return kExitOk;
}

int cmd_export(const RunConfig& config, bool from_checkpoint,
               std::ostream& out) {
  fs::create_directories(config.output_dir);
  if (from_checkpoint) {
    if (!config.checkpoint_dir) throw ConfigError("checkpoint_dir is not set");
    const auto unified = load_checkpoint_unified(*config.checkpoint_dir);
    if (!unified) {
      throw ConfigError(fmt::format("{} holds no completed iteration",
                                    config.checkpoint_dir->string()));
    }
    save_generic(unified->graph(), config.output_dir / "unified.kg");
    save_provenance(*unified, config.output_dir / "provenance.tsv");
    out << fmt::format("exported unified graph of {} input graphs to {}\n",
                       unified->members().size(), config.output_dir.string());
    return kExitOk;
  }
  const auto bundle = load_dataset(config);
  for (const auto& g : bundle.graphs) {
    save_generic(g, config.output_dir / fmt::format("graph_{}.kg", g.id().value));
  }
  for (const auto& gold : bundle.gold) {
    save_gold_tsv(gold, config.output_dir /
                            fmt::format("gold_{}_{}.tsv", gold.source_graph.value,
                                        gold.target_graph.value));
  }
  out << fmt::format("exported {} graph(s) and {} gold file(s) to {}\n",
                     bundle.graphs.size(), bundle.gold.size(),
                     config.output_dir.string());
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"kgfuse: zero-shot multilingual knowledge graph fusion", "kgfuse"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  struct Verb {
    CLI::App* cmd;
    FlagValues flags;
  };
  std::map<std::string, Verb> verbs;
  auto add_verb = [&](const std::string& name, const std::string& help) {
    auto& verb = verbs[name];
    verb.cmd = app.add_subcommand(name, help);
    add_config_flags(*verb.cmd, verb.flags);
    return verb.cmd;
  };

  add_verb("fuse", "Align and fuse all graphs; write the unified graph, "
                   "provenance, alignment dumps and the report");
  add_verb("align", "Align the first two graphs only and write the dump");
  std::string eval_dump;
  add_verb("eval", "Score an alignment dump against gold")
      ->add_option("--dump", eval_dump,
                   "Alignment dump (default: <output_dir>/alignments_iter_2.tsv)");
  std::string sweep_dump;
  std::vector<std::string> sweep_taus;
  auto* sweep = add_verb("sweep", "Threshold sweep over an alignment dump");
  sweep->add_option("--dump", sweep_dump,
                    "Alignment dump (default: <output_dir>/alignments_iter_2.tsv)");
  auto* taus_opt = sweep->add_option("--taus", sweep_taus,
                                     "Comma-separated thresholds "
                                     "(default 0,0.8,0.9,0.95)");
  add_verb("estimate", "Print batch and cost plan without calling a backend");
  bool from_checkpoint = false;
  add_verb("export", "Write input graphs, or the checkpointed unified graph, "
                     "in the generic format")
      ->add_flag("--from-checkpoint", from_checkpoint,
                 "Export the unified graph from checkpoint_dir");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream err;
    app.exit(e, err, err);
    spdlog::error("{}", err.str());
    return kExitUsage;
  }

  std::string name;
  for (auto& [verb_name, verb] : verbs) {
    if (verb.cmd->parsed()) name = verb_name;
  }
  try {
    const auto config = resolve_config(verbs.at(name).flags);
    configure_logging(config);
    if (name == "fuse") return cmd_fuse(config, out);
    if (name == "align") return cmd_align(config, out);
    if (name == "eval") return cmd_eval(config, eval_dump, out);
    if (name == "sweep") {
      return cmd_sweep(config, sweep_dump,
                       parse_taus(sweep_taus, taus_opt->count() > 0), out);
    }
    if (name == "estimate") return cmd_estimate(config, out);
    return cmd_export(config, from_checkpoint, out);
  } catch (const PipelineAborted& e) {
    spdlog::error("{} (rerun with the same checkpoint_dir to resume)",
                  e.what());
    return kExitBackend;
  } catch (const BackendError& e) {
    spdlog::error("backend: {}", e.what());
    return kExitBackend;
  } catch (const ConfigError& e) {
    spdlog::error("configuration: {}", e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    spdlog::error("data: {}", e.what());
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  }
}

}  // namespace kgfuse::cli
