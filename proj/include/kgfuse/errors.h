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

#ifndef KGFUSE_ERRORS_H_
#define KGFUSE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace kgfuse {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (graphs, gold files, checkpoints).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid user configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A backend call failed. Task-level failures are recorded and the pipeline
// moves on; fatal ones (bad credentials, misconfigured endpoint) abort the run.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, bool fatal)
      : Error(what), fatal_(fatal) {}

  bool fatal() const { return fatal_; }

 private:
  bool fatal_;
};

}  // namespace kgfuse

#endif  // KGFUSE_ERRORS_H_
