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

// Writes a synthetic graph family in the generic format.
//
//   make_synthetic <output_dir> [graphs] [seed]

#include <cstdlib>
#include <exception>
#include <iostream>

#include "kgfuse/synthetic.h"

int main(int argc, char** argv) {
  if (argc < 2 || argc > 4) {
    std::cerr << "usage: make_synthetic <output_dir> [graphs] [seed]\n";
    return 1;
  }
  kgfuse::SyntheticConfig config;
  if (argc > 2) config.graphs = std::strtoul(argv[2], nullptr, 10);
  if (argc > 3) config.seed = std::strtoull(argv[3], nullptr, 10);
  try {
    const auto bundle = kgfuse::make_synthetic(config);
    kgfuse::save_bundle(bundle, argv[1]);
    for (const auto& g : bundle.graphs) {
      std::cout << "graph " << g.id() << " (" << g.lang()
                << "): " << g.entities().size() << " entities, "
                << g.relations().size() << " relations, "
                << g.triples().size() << " triples\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "make_synthetic: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
