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

#include "kgfuse/ingest.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "kgfuse/errors.h"
#include "kgfuse/text_util.h"

namespace kgfuse {
namespace {

constexpr std::string_view kGenericMagic = "kgfuse-graph";
constexpr std::string_view kGenericVersion = "1";

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError(fmt::format("cannot open {}", path.string()));
  }
  return in;
}

std::uint32_t parse_id_or_throw(std::string_view field,
                                std::string_view where) {
  auto id = parse_u32(field);
  if (!id) {
    throw DataError(fmt::format("{}: expected an integer id, got '{}'", where,
                                field));
  }
  return *id;
}

std::string location(const std::filesystem::path& path, std::size_t line) {
  return fmt::format("{}:{}", path.string(), line);
}

// Lines of "<id>\t<uri>". Returns id -> uri in file order.
std::map<std::uint32_t, std::string> read_id_uri_file(
    const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::map<std::uint32_t, std::string> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() < 2) {
      throw DataError(fmt::format("{}: expected '<id>\\t<uri>'",
                                  location(path, lineno)));
    }
    auto id = parse_id_or_throw(fields[0], location(path, lineno));
    if (!out.emplace(id, std::string(fields[1])).second) {
      throw DataError(
          fmt::format("{}: duplicate id {}", location(path, lineno), id));
    }
  }
  return out;
}

KnowledgeGraph read_dbp15k_graph(const std::filesystem::path& dir, int side,
                                 GraphId graph_id, const std::string& lang) {
  const auto ent_path = dir / fmt::format("ent_ids_{}", side);
  const auto rel_path = dir / fmt::format("rel_ids_{}", side);
  const auto tri_path = dir / fmt::format("triples_{}", side);

  std::map<EntityId, LabelSet> entities;
  for (const auto& [id, uri] : read_id_uri_file(ent_path)) {
    entities[EntityId{id}] = {Label{label_from_uri(uri), lang}};
  }
  std::map<RelationId, LabelSet> relations;
  for (const auto& [id, uri] : read_id_uri_file(rel_path)) {
    relations[RelationId{id}] = {Label{label_from_uri(uri), lang}};
  }

  auto in = open_or_throw(tri_path);
  std::vector<Triple> triples;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    const auto where = location(tri_path, lineno);
    if (fields.size() != 3) {
      throw DataError(fmt::format("{}: expected 3 tab-separated ids", where));
    }
    Triple t{EntityId{parse_id_or_throw(fields[0], where)},
             RelationId{parse_id_or_throw(fields[1], where)},
             EntityId{parse_id_or_throw(fields[2], where)}};
    if (!entities.contains(t.head) || !entities.contains(t.tail) ||
        !relations.contains(t.relation)) {
      throw DataError(fmt::format("{}: triple {} references an unknown id",
                                  where, to_string(t)));
    }
    triples.push_back(t);
  }
  return build_graph(graph_id, lang, std::move(entities), std::move(relations),
                     triples);
}

template <typename Id>
std::map<Id, Id> read_pair_file(const std::filesystem::path& path,
                                auto&& source_has, auto&& target_has) {
  auto in = open_or_throw(path);
  std::map<Id, Id> pairs;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    const auto where = location(path, lineno);
    if (fields.size() != 2) {
      throw DataError(fmt::format("{}: expected 2 tab-separated ids", where));
    }
    Id s{parse_id_or_throw(fields[0], where)};
    Id t{parse_id_or_throw(fields[1], where)};
    if (!source_has(s) || !target_has(t)) {
      throw DataError(fmt::format("{}: pair ({}, {}) cites an unknown id",
                                  where, s.value, t.value));
    }
    auto [it, inserted] = pairs.emplace(s, t);
    if (!inserted && it->second != t) {
      throw DataError(fmt::format("{}: source {} already aligned to {}", where,
                                  s.value, it->second.value));
    }
  }
  return pairs;
}

void write_labels(std::ostream& out, const LabelSet& labels) {
  for (const auto& label : labels) {
    out << '\t' << escape_field(label.lang) << '\t' << escape_field(label.text);
  }
}

LabelSet parse_labels(std::span<const std::string_view> fields,
                      std::string_view where) {
  if (fields.empty() || fields.size() % 2 != 0) {
    throw DataError(
        fmt::format("{}: expected one or more <lang>\\t<text> pairs", where));
  }
  LabelSet labels;
  for (std::size_t i = 0; i < fields.size(); i += 2) {
    labels.push_back(
        Label{unescape_field(fields[i + 1]), unescape_field(fields[i])});
  }
  return labels;
}

}  // namespace

const GoldAlignment* DatasetBundle::find_gold(GraphId source,
                                              GraphId target) const {
  for (const auto& g : gold) {
    if (g.source_graph == source && g.target_graph == target) return &g;
  }
  return nullptr;
}

std::string label_from_uri(std::string_view uri) {
  while (!uri.empty() && uri.back() == '/') uri.remove_suffix(1);
  if (auto slash = uri.rfind('/'); slash != std::string_view::npos) {
    uri.remove_prefix(slash + 1);
  }
  std::string decoded = percent_decode(uri);
  for (char& c : decoded) {
    if (c == '_') c = ' ';
  }
  return decoded;
}

DatasetBundle load_dbp15k(const std::filesystem::path& directory,
                          std::string_view pair_name) {
  auto dir = directory;
  if (std::filesystem::is_directory(directory / pair_name)) {
    dir = directory / pair_name;
  }
  if (!std::filesystem::is_directory(dir)) {
    throw DataError(fmt::format("no such directory: {}", dir.string()));
  }
  const auto underscore = pair_name.find('_');
  if (underscore == std::string_view::npos || underscore == 0 ||
      underscore + 1 == pair_name.size()) {
    throw DataError(fmt::format(
        "pair name '{}' is not of the form <lang1>_<lang2>", pair_name));
  }
  const std::string lang1(pair_name.substr(0, underscore));
  const std::string lang2(pair_name.substr(underscore + 1));

  DatasetBundle bundle;
  bundle.graphs.push_back(read_dbp15k_graph(dir, 1, GraphId{1}, lang1));
  bundle.graphs.push_back(read_dbp15k_graph(dir, 2, GraphId{2}, lang2));

  GoldAlignment gold{GraphId{1}, GraphId{2}, {}};
  const auto ref_path = dir / "ref_ent_ids";
  if (!std::filesystem::exists(ref_path)) {
    throw DataError(fmt::format("cannot open {}", ref_path.string()));
  }
  gold = load_gold_tsv(ref_path, bundle.graphs[0], bundle.graphs[1]);
  if (const auto sup = dir / "sup_ent_ids"; std::filesystem::exists(sup)) {
    auto train = load_gold_tsv(sup, bundle.graphs[0], bundle.graphs[1]);
    for (const auto& [s, t] : train.pairs) {
      auto [it, inserted] = gold.pairs.emplace(s, t);
      if (!inserted && it->second != t) {
        throw DataError(fmt::format("{}: source {} aligned differently in "
                                    "ref_ent_ids", sup.string(), s.value));
      }
    }
  }
  bundle.gold.push_back(std::move(gold));
  return bundle;
}

KnowledgeGraph load_generic(const std::filesystem::path& path,
                            std::vector<std::string>* warnings) {
  auto in = open_or_throw(path);
  return read_generic(in, path.string(), warnings);
}

KnowledgeGraph read_generic(std::istream& in, std::string_view source_name,
                            std::vector<std::string>* warnings) {
  bool seen_magic = false;
  std::optional<GraphId> graph_id;
  std::string lang;
  std::map<EntityId, LabelSet> entities;
  std::map<RelationId, LabelSet> relations;
  std::vector<Triple> triples;

  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    const auto where = fmt::format("{}:{}", source_name, lineno);
    auto fields = split_tabs(line);
    const std::string_view tag = fields[0];

    if (!seen_magic) {
      if (tag != kGenericMagic || fields.size() != 2) {
        throw DataError(fmt::format("{}: missing '{}' header", where,
                                    kGenericMagic));
      }
      if (fields[1] != kGenericVersion) {
        throw DataError(fmt::format("{}: unsupported format version {}",
                                    where, fields[1]));
      }
      seen_magic = true;
      continue;
    }

    if (tag == "graph") {
      if (graph_id) {
        throw DataError(fmt::format("{}: duplicate graph record", where));
      }
      if (fields.size() != 3 || fields[2].empty()) {
        throw DataError(
            fmt::format("{}: expected 'graph\\t<id>\\t<lang>'", where));
      }
      graph_id = GraphId{parse_id_or_throw(fields[1], where)};
      lang = unescape_field(fields[2]);
    } else if (tag == "entity") {
      if (fields.size() < 2) {
        throw DataError(fmt::format("{}: entity record without id", where));
      }
      EntityId id{parse_id_or_throw(fields[1], where)};
      auto labels =
          parse_labels(std::span(fields).subspan(2), where);
      if (!entities.emplace(id, std::move(labels)).second) {
        throw DataError(
            fmt::format("{}: duplicate entity id {}", where, id.value));
      }
    } else if (tag == "relation") {
      if (fields.size() < 2) {
        throw DataError(fmt::format("{}: relation record without id", where));
      }
      RelationId id{parse_id_or_throw(fields[1], where)};
      auto labels =
          parse_labels(std::span(fields).subspan(2), where);
      if (!relations.emplace(id, std::move(labels)).second) {
        throw DataError(
            fmt::format("{}: duplicate relation id {}", where, id.value));
      }
    } else if (tag == "triple") {
      if (fields.size() != 4) {
        throw DataError(fmt::format(
            "{}: expected 'triple\\t<head>\\t<relation>\\t<tail>'", where));
      }
      Triple t{EntityId{parse_id_or_throw(fields[1], where)},
               RelationId{parse_id_or_throw(fields[2], where)},
               EntityId{parse_id_or_throw(fields[3], where)}};
      if (!entities.contains(t.head) || !entities.contains(t.tail) ||
          !relations.contains(t.relation)) {
        throw DataError(fmt::format("{}: triple {} references an unknown id",
                                    where, to_string(t)));
      }
      triples.push_back(t);
    } else {
      throw DataError(fmt::format("{}: unknown record type '{}'", where, tag));
    }
  }

  if (!seen_magic) {
    throw DataError(fmt::format("{}: empty input", source_name));
  }
  if (!graph_id) {
    throw DataError(fmt::format("{}: missing graph record", source_name));
  }
  if (triples.empty() && warnings != nullptr) {
    warnings->push_back(fmt::format("{}: graph has no triples", source_name));
  }
  return build_graph(*graph_id, std::move(lang), std::move(entities),
                     std::move(relations), triples);
}

void write_generic(const KnowledgeGraph& graph, std::ostream& out) {
  out << kGenericMagic << '\t' << kGenericVersion << '\n';
  out << "graph\t" << graph.id().value << '\t' << escape_field(graph.lang())
      << '\n';
  for (const auto& [id, labels] : graph.entities()) {
    out << "entity\t" << id.value;
    write_labels(out, labels);
    out << '\n';
  }
  for (const auto& [id, labels] : graph.relations()) {
    out << "relation\t" << id.value;
    write_labels(out, labels);
    out << '\n';
  }
  for (const auto& t : graph.triples()) {
    out << "triple\t" << t.head.value << '\t' << t.relation.value << '\t'
        << t.tail.value << '\n';
  }
}

void save_generic(const KnowledgeGraph& graph,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  write_generic(graph, out);
}

GoldAlignment load_gold_tsv(const std::filesystem::path& path,
                            const KnowledgeGraph& source,
                            const KnowledgeGraph& target) {
  return GoldAlignment{
      source.id(), target.id(),
      read_pair_file<EntityId>(
          path, [&](EntityId id) { return source.has_entity(id); },
          [&](EntityId id) { return target.has_entity(id); })};
}

RelationGold load_relation_gold_tsv(const std::filesystem::path& path,
                                    const KnowledgeGraph& source,
                                    const KnowledgeGraph& target) {
  return RelationGold{
      source.id(), target.id(),
      read_pair_file<RelationId>(
          path, [&](RelationId id) { return source.has_relation(id); },
          [&](RelationId id) { return target.has_relation(id); })};
}

void save_gold_tsv(const GoldAlignment& gold,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  for (const auto& [s, t] : gold.pairs) {
    out << s.value << '\t' << t.value << '\n';
  }
}

void save_relation_gold_tsv(const RelationGold& gold,
                            const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  for (const auto& [s, t] : gold.pairs) {
    out << s.value << '\t' << t.value << '\n';
  }
}

}  // namespace kgfuse
