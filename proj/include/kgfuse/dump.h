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

// Alignment dumps: the unfiltered aggregation of one iteration, written
// before fusion so that evaluation and threshold sweeps never need the
// backend again.

#ifndef KGFUSE_DUMP_H_
#define KGFUSE_DUMP_H_

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "kgfuse/aggregator.h"

namespace kgfuse {

struct AlignmentDump {
  int iteration = 0;
  // Graphs folded into the source side, in integration order.
  std::vector<GraphId> source_graphs;
  GraphId incoming;
  AlignmentSet aggregated;

  friend bool operator==(const AlignmentDump&, const AlignmentDump&) = default;
};

void write_dump(const AlignmentDump& dump, std::ostream& out);
void save_dump(const AlignmentDump& dump, const std::filesystem::path& path);

// Throw DataError with a line number on malformed input.
AlignmentDump read_dump(std::istream& in, std::string_view source_name);
AlignmentDump load_dump(const std::filesystem::path& path);

std::filesystem::path dump_path(const std::filesystem::path& output_dir,
                                int iteration);

}  // namespace kgfuse

#endif  // KGFUSE_DUMP_H_
