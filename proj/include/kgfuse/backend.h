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

// The alignment backend contract shared by the hosted-LLM client, the
// dictionary oracle and the caching decorator.

#ifndef KGFUSE_BACKEND_H_
#define KGFUSE_BACKEND_H_

#include <chrono>
#include <deque>
#include <mutex>
#include <string>

#include "kgfuse/linearizer.h"

namespace kgfuse {

enum class BackendKind { kHttpLlm, kOracle };

struct BackendConfig {
  BackendKind kind = BackendKind::kOracle;
  std::string model_name = "oracle";
  double temperature = 0.0;
  // Full URL of a chat-completions style endpoint.
  std::string endpoint;
  // Name of the environment variable holding the API key.
  std::string api_key_env = "KGFUSE_API_KEY";
  int requests_per_minute = 60;
  std::chrono::seconds timeout{120};
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{1000};
  int max_output_tokens = 8192;
};

// Throws ConfigError.
void validate(const BackendConfig& config);

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view name);

struct RawResponse {
  // Provider text, verbatim. May be empty or malformed.
  std::string text;
  // The provider reported that output hit its length limit.
  bool truncated_hint = false;
  std::chrono::milliseconds latency{0};
  bool cache_hit = false;
};

// submit() must be safe to call concurrently. Implementations throw
// BackendError: fatal() errors abort the run, others fail only the task.
class AlignmentBackend {
 public:
  virtual ~AlignmentBackend() = default;
  virtual RawResponse submit(const Prompt& prompt) = 0;
};

class Clock {
 public:
  using time_point = std::chrono::steady_clock::time_point;
  using duration = std::chrono::steady_clock::duration;

  virtual ~Clock() = default;
  virtual time_point now() const = 0;
  virtual void sleep_for(duration d) = 0;
};

Clock& system_clock();

// At most `max_requests` acquisitions in any half-open interval of length
// `window`. Shared by all workers; acquire() blocks.
class RateLimiter {
 public:
  RateLimiter(int max_requests, Clock::duration window, Clock& clock);

  void acquire();

 private:
  const std::size_t max_requests_;
  const Clock::duration window_;
  Clock& clock_;
  std::mutex mu_;
  std::deque<Clock::time_point> issued_;
};

}  // namespace kgfuse

#endif  // KGFUSE_BACKEND_H_
