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

// The kgfuse command line: fuse, align, eval, sweep, estimate, export.

#ifndef KGFUSE_TOOLS_CLI_H_
#define KGFUSE_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace kgfuse::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitBackend = 3,
};

// `args` excludes the program name. Reports and summaries go to `out`;
// logs go to stderr.
int run(const std::vector<std::string>& args, std::ostream& out);

}  // namespace kgfuse::cli

#endif  // KGFUSE_TOOLS_CLI_H_
