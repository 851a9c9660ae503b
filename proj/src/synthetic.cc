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

#include "kgfuse/synthetic.h"

#include <algorithm>
#include <array>
#include <numeric>
#include <random>
#include <set>
#include <string_view>

#include <fmt/format.h>

#include "kgfuse/errors.h"

namespace kgfuse {
namespace {

constexpr std::array<std::string_view, 24> kLatinSyllables = {
    "ka", "ro", "mi", "ten", "bar", "lo", "su", "dan", "ve", "nor", "pi", "tal",
    "gri", "mos", "ha", "len", "cor", "vi", "sel", "du", "ran", "te", "bo", "fin"};
constexpr std::array<std::string_view, 20> kFrenchSyllables = {
    "lou", "mar", "ch\xC3\xA8", "val", "ri", "bel", "on", "pr\xC3\xA9", "sau",
    "mon", "teau", "vi", "gne", "ro", "qua", "lis", "fon", "d\xC3\xA9", "ber",
    "cy"};

std::string utf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string code_points(std::mt19937_64& rng, char32_t first, char32_t count,
                        std::size_t length) {
  std::string out;
  for (std::size_t i = 0; i < length; ++i) {
    out += utf8(first + static_cast<char32_t>(uniform(rng, 0, count - 1)));
  }
  return out;
}

template <std::size_t N>
std::string latin_word(std::mt19937_64& rng,
                       const std::array<std::string_view, N>& syllables,
                       bool capitalize) {
  std::string out;
  const std::size_t n = uniform(rng, 2, 3);
  for (std::size_t i = 0; i < n; ++i) {
    out += syllables[uniform(rng, 0, N - 1)];
  }
  if (capitalize && out[0] >= 'a' && out[0] <= 'z') out[0] -= 'a' - 'A';
  return out;
}

template <std::size_t N>
std::string latin_label(std::mt19937_64& rng,
                        const std::array<std::string_view, N>& syllables,
                        bool relation) {
  if (relation) {
    return latin_word(rng, syllables, false) + "_" +
           latin_word(rng, syllables, false);
  }
  std::string out = latin_word(rng, syllables, true);
  if (uniform(rng, 0, 1) == 1) out += " " + latin_word(rng, syllables, true);
  return out;
}

std::string make_label(std::mt19937_64& rng, std::string_view lang,
                       bool relation) {
  if (lang == "zh") {
    return code_points(rng, 0x4E00, 1500, relation ? 2 : uniform(rng, 2, 3));
  }
  if (lang == "ja") {
    return relation ? code_points(rng, 0x3042, 80, uniform(rng, 2, 3))
                    : code_points(rng, 0x30A2, 80, uniform(rng, 3, 5));
  }
  if (lang == "fr") return latin_label(rng, kFrenchSyllables, relation);
  return latin_label(rng, kLatinSyllables, relation);
}

// Labels unique under normalization within one graph.
std::vector<std::string> unique_labels(std::mt19937_64& rng,
                                       std::string_view lang, std::size_t n,
                                       bool relation,
                                       std::set<std::string>& used) {
  std::vector<std::string> out;
  out.reserve(n);
  while (out.size() < n) {
    auto label = make_label(rng, lang, relation);
    if (used.insert(normalize_label(label)).second) {
      out.push_back(std::move(label));
    }
  }
  return out;
}

std::vector<std::uint32_t> shuffled_range(std::mt19937_64& rng,
                                          std::uint32_t base, std::size_t n) {
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), base);
  std::shuffle(ids.begin(), ids.end(), rng);
  return ids;
}

}  // namespace

DatasetBundle make_synthetic(const SyntheticConfig& config) {
  if (config.graphs < 2) throw ConfigError("need at least two graphs");
  if (config.entities < 2 || config.shared_entities > config.entities) {
    throw ConfigError("need 2 <= entities and shared_entities <= entities");
  }
  if (config.relations == 0 || config.triples_per_head == 0) {
    throw ConfigError("need at least one relation and one triple per head");
  }
  if (config.langs.empty()) throw ConfigError("need at least one language");

  std::mt19937_64 rng(config.seed);
  const std::size_t n_entities = config.entities;
  const std::size_t n_shared = config.shared_entities;
  const std::size_t n_relations = config.relations;

  auto any_other = [&](std::size_t h, std::size_t range) {
    std::size_t t = uniform(rng, 0, range - 2);
    return t >= h ? t + 1 : t;
  };

  // Facts among shared concepts, present in every graph.
  struct Fact {
    std::size_t head, relation, tail;
  };
  std::vector<Fact> common;
  if (n_shared >= 2) {
    for (std::size_t h = 0; h < n_shared; ++h) {
      for (std::size_t k = 0; k + 1 < config.triples_per_head; ++k) {
        common.push_back({h, uniform(rng, 0, n_relations - 1),
                          any_other(h, n_shared)});
      }
    }
  }

  DatasetBundle bundle;
  std::vector<std::vector<std::uint32_t>> entity_ids;
  std::vector<std::vector<std::uint32_t>> relation_ids;
  for (std::size_t g = 0; g < config.graphs; ++g) {
    const std::string& lang = config.langs[g % config.langs.size()];
    const GraphId graph_id{static_cast<std::uint32_t>(g + 1)};
    auto eids = shuffled_range(
        rng, static_cast<std::uint32_t>(g * n_entities), n_entities);
    auto rids = shuffled_range(
        rng, static_cast<std::uint32_t>(g * n_relations), n_relations);

    std::set<std::string> used;
    const auto entity_texts =
        unique_labels(rng, lang, n_entities, /*relation=*/false, used);
    const auto relation_texts =
        unique_labels(rng, lang, n_relations, /*relation=*/true, used);

    std::map<EntityId, LabelSet> entities;
    for (std::size_t c = 0; c < n_entities; ++c) {
      entities[EntityId{eids[c]}] = {Label{entity_texts[c], lang}};
    }
    std::map<RelationId, LabelSet> relations;
    for (std::size_t r = 0; r < n_relations; ++r) {
      relations[RelationId{rids[r]}] = {Label{relation_texts[r], lang}};
    }

    std::vector<Triple> triples;
    auto add = [&](std::size_t h, std::size_t r, std::size_t t) {
      triples.push_back(
          Triple{EntityId{eids[h]}, RelationId{rids[r]}, EntityId{eids[t]}});
    };
    for (const auto& f : common) add(f.head, f.relation, f.tail);
    for (std::size_t h = 0; h < n_entities; ++h) {
      const std::size_t own =
          h < n_shared && n_shared >= 2 ? 1 : config.triples_per_head;
      for (std::size_t k = 0; k < own; ++k) {
        add(h, uniform(rng, 0, n_relations - 1), any_other(h, n_entities));
      }
    }

    bundle.graphs.push_back(build_graph(graph_id, lang, std::move(entities),
                                        std::move(relations), triples));
    entity_ids.push_back(std::move(eids));
    relation_ids.push_back(std::move(rids));
  }

  for (std::size_t i = 0; i < config.graphs; ++i) {
    for (std::size_t j = i + 1; j < config.graphs; ++j) {
      GoldAlignment gold{bundle.graphs[i].id(), bundle.graphs[j].id(), {}};
      for (std::size_t c = 0; c < n_shared; ++c) {
        gold.pairs.emplace(EntityId{entity_ids[i][c]},
                           EntityId{entity_ids[j][c]});
      }
      RelationGold relation_gold{bundle.graphs[i].id(), bundle.graphs[j].id(),
                                 {}};
      for (std::size_t r = 0; r < n_relations; ++r) {
        relation_gold.pairs.emplace(RelationId{relation_ids[i][r]},
                                    RelationId{relation_ids[j][r]});
      }
      bundle.gold.push_back(std::move(gold));
      bundle.relation_gold.push_back(std::move(relation_gold));
    }
  }
  return bundle;
}

void save_bundle(const DatasetBundle& bundle,
                 const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  for (const auto& g : bundle.graphs) {
    save_generic(g, directory / fmt::format("graph_{}.kg", g.id().value));
  }
  for (const auto& gold : bundle.gold) {
    save_gold_tsv(gold, directory / fmt::format("gold_{}_{}.tsv",
                                                gold.source_graph.value,
                                                gold.target_graph.value));
  }
  for (const auto& gold : bundle.relation_gold) {
    save_relation_gold_tsv(
        gold, directory / fmt::format("relation_gold_{}_{}.tsv",
                                      gold.source_graph.value,
                                      gold.target_graph.value));
  }
}

}  // namespace kgfuse
