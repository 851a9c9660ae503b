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

#ifndef KGFUSE_IDS_H_
#define KGFUSE_IDS_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace kgfuse {

// Integer identifier tagged with the kind of thing it names, so that entity
// and relation ids cannot be mixed up by accident.
template <typename Tag>
struct StrongId {
  std::uint32_t value = 0;

  constexpr StrongId() = default;
  constexpr explicit StrongId(std::uint32_t v) : value(v) {}

  constexpr auto operator<=>(const StrongId&) const = default;

  friend std::ostream& operator<<(std::ostream& os, StrongId id) {
    return os << id.value;
  }
};

using GraphId = StrongId<struct GraphIdTag>;
using EntityId = StrongId<struct EntityIdTag>;
using RelationId = StrongId<struct RelationIdTag>;

// The unified graph produced by fusion carries this graph id. Input graphs
// use ids >= 1.
inline constexpr GraphId kUnifiedGraphId{0};

// An id scoped to the graph that owns it.
template <typename Id>
struct ScopedRef {
  GraphId graph;
  Id id;

  constexpr auto operator<=>(const ScopedRef&) const = default;
};

using EntityRef = ScopedRef<EntityId>;
using RelationRef = ScopedRef<RelationId>;

}  // namespace kgfuse

template <typename Tag>
struct std::hash<kgfuse::StrongId<Tag>> {
  std::size_t operator()(kgfuse::StrongId<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

#endif  // KGFUSE_IDS_H_
