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

#include "kgfuse/dump.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "kgfuse/errors.h"
#include "kgfuse/text_util.h"

namespace kgfuse {
namespace {

constexpr std::string_view kMagic = "# kgfuse alignment dump v1";

template <typename Id>
void write_table(std::string_view kind, const AlignmentTable<Id>& table,
                 std::ostream& out) {
  for (const auto& [source, list] : table.ranked) {
    auto chosen = table.chosen.find(source);
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& c = list[i];
      const bool is_chosen =
          chosen != table.chosen.end() && chosen->second == c;
      out << fmt::format("candidate\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", kind,
                         source.value, c.target.value, c.confidence,
                         c.pair_index, i + 1, is_chosen ? 1 : 0);
    }
  }
}

template <typename Id>
struct Row {
  std::size_t rank;
  Candidate<Id> candidate;
  bool chosen;
  std::string where;
};

template <typename Id>
AlignmentTable<Id> assemble(std::map<Id, std::vector<Row<Id>>> rows) {
  AlignmentTable<Id> table;
  for (auto& [source, list] : rows) {
    std::sort(list.begin(), list.end(),
              [](const Row<Id>& a, const Row<Id>& b) { return a.rank < b.rank; });
    auto& ranked = table.ranked[source];
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& row = list[i];
      if (row.rank != i + 1) {
        throw DataError(fmt::format("{}: ranks of source {} are not 1..{}",
                                    row.where, source.value, list.size()));
      }
      if (i > 0 && !ranks_before(list[i - 1].candidate, row.candidate)) {
        throw DataError(fmt::format("{}: candidate is out of rank order",
                                    row.where));
      }
      if (row.chosen &&
          !table.chosen.emplace(source, row.candidate).second) {
        throw DataError(fmt::format("{}: source {} has two chosen targets",
                                    row.where, source.value));
      }
      ranked.push_back(row.candidate);
    }
  }
  return table;
}

std::uint32_t parse_id(std::string_view field, std::string_view where) {
  auto v = parse_u32(field);
  if (!v) throw DataError(fmt::format("{}: bad id '{}'", where, field));
  return *v;
}

}  // namespace

void write_dump(const AlignmentDump& dump, std::ostream& out) {
  out << kMagic << '\n';
  out << fmt::format("iteration\t{}\n", dump.iteration);
  std::vector<std::uint32_t> sources;
  for (auto g : dump.source_graphs) sources.push_back(g.value);
  out << fmt::format("sources\t{}\n", fmt::join(sources, ","));
  out << fmt::format("incoming\t{}\n", dump.incoming.value);
  out << "# candidate\t<kind>\t<source>\t<target>\t<confidence>\t"
         "<pair_index>\t<rank>\t<chosen>\n";
  write_table("entity", dump.aggregated.entities, out);
  write_table("relation", dump.aggregated.relations, out);
}

void save_dump(const AlignmentDump& dump, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  write_dump(dump, out);
  if (!out) throw DataError(fmt::format("error writing {}", path.string()));
}

AlignmentDump read_dump(std::istream& in, std::string_view source_name) {
  AlignmentDump dump;
  std::map<EntityId, std::vector<Row<EntityId>>> entities;
  std::map<RelationId, std::vector<Row<RelationId>>> relations;
  bool saw_magic = false;
  bool saw_iteration = false;
  bool saw_incoming = false;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    strip_cr(line);
    const auto where = fmt::format("{}:{}", source_name, lineno);
    if (lineno == 1) {
      if (line != kMagic) {
        throw DataError(fmt::format("{}: not an alignment dump", where));
      }
      saw_magic = true;
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields[0] == "iteration" && fields.size() == 2) {
      dump.iteration = static_cast<int>(parse_id(fields[1], where));
      saw_iteration = true;
    } else if (fields[0] == "incoming" && fields.size() == 2) {
      dump.incoming = GraphId{parse_id(fields[1], where)};
      saw_incoming = true;
    } else if (fields[0] == "sources" && fields.size() == 2) {
      std::string_view rest = fields[1];
      while (!rest.empty()) {
        auto comma = rest.find(',');
        dump.source_graphs.push_back(
            GraphId{parse_id(rest.substr(0, comma), where)});
        rest = comma == std::string_view::npos ? std::string_view{}
                                               : rest.substr(comma + 1);
      }
    } else if (fields[0] == "candidate" && fields.size() == 8) {
      const auto confidence = parse_double(fields[4]);
      if (!confidence || *confidence < 0.0 || *confidence > 1.0) {
        throw DataError(fmt::format("{}: bad confidence '{}'", where,
                                    fields[4]));
      }
      const std::uint32_t source = parse_id(fields[2], where);
      const std::uint32_t target = parse_id(fields[3], where);
      const std::size_t pair_index = parse_id(fields[5], where);
      const std::size_t rank = parse_id(fields[6], where);
      if (fields[7] != "0" && fields[7] != "1") {
        throw DataError(fmt::format("{}: chosen flag must be 0 or 1", where));
      }
      const bool chosen = fields[7] == "1";
      if (fields[1] == "entity") {
        entities[EntityId{source}].push_back(Row<EntityId>{
            rank, {EntityId{target}, *confidence, pair_index}, chosen, where});
      } else if (fields[1] == "relation") {
        relations[RelationId{source}].push_back(Row<RelationId>{
            rank, {RelationId{target}, *confidence, pair_index}, chosen,
            where});
      } else {
        throw DataError(fmt::format("{}: unknown kind '{}'", where, fields[1]));
      }
    } else {
      throw DataError(fmt::format("{}: unrecognized record", where));
    }
  }
  if (!saw_magic) {
    throw DataError(fmt::format("{}: empty alignment dump", source_name));
  }
  if (!saw_iteration || !saw_incoming) {
    throw DataError(fmt::format("{}: missing iteration or incoming record",
                                source_name));
  }
  dump.aggregated.entities = assemble(std::move(entities));
  dump.aggregated.relations = assemble(std::move(relations));
  return dump;
}

AlignmentDump load_dump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  return read_dump(in, path.string());
}

std::filesystem::path dump_path(const std::filesystem::path& output_dir,
                                int iteration) {
  return output_dir / fmt::format("alignments_iter_{}.tsv", iteration);
}

}  // namespace kgfuse
