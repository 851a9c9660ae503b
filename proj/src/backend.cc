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

#include "kgfuse/backend.h"

#include <thread>

#include <fmt/format.h>

#include "kgfuse/errors.h"

namespace kgfuse {
namespace {

class SteadyClock final : public Clock {
 public:
  time_point now() const override { return std::chrono::steady_clock::now(); }
  void sleep_for(duration d) override { std::this_thread::sleep_for(d); }
};

}  // namespace

void validate(const BackendConfig& config) {
  if (config.temperature < 0.0) {
    throw ConfigError("temperature must be >= 0");
  }
  if (config.requests_per_minute <= 0) {
    throw ConfigError("requests_per_minute must be > 0");
  }
  if (config.max_retries < 0) {
    throw ConfigError("max_retries must be >= 0");
  }
  if (config.model_name.empty()) {
    throw ConfigError("model_name must not be empty");
  }
  if (config.kind == BackendKind::kHttpLlm) {
    if (config.endpoint.empty()) {
      throw ConfigError("the http-llm backend needs an endpoint URL");
    }
    if (config.timeout.count() <= 0) {
      throw ConfigError("timeout must be positive");
    }
  }
}

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kHttpLlm: return "http-llm";
    case BackendKind::kOracle: return "oracle";
  }
  return "unknown";
}

BackendKind parse_backend_kind(std::string_view name) {
  if (name == "http-llm") return BackendKind::kHttpLlm;
  if (name == "oracle") return BackendKind::kOracle;
  throw ConfigError(fmt::format(
      "unknown backend '{}' (expected http-llm or oracle)", name));
}

Clock& system_clock() {
  static SteadyClock clock;
  return clock;
}

RateLimiter::RateLimiter(int max_requests, Clock::duration window,
                         Clock& clock)
    : max_requests_(static_cast<std::size_t>(max_requests)),
      window_(window),
      clock_(clock) {
  if (max_requests <= 0) {
    throw ConfigError("rate limit must be > 0");
  }
}

void RateLimiter::acquire() {
  // The lock is held while sleeping; other workers queue behind this one.
  std::lock_guard lock(mu_);
  while (true) {
    const auto now = clock_.now();
    while (!issued_.empty() && issued_.front() + window_ <= now) {
      issued_.pop_front();
    }
    if (issued_.size() < max_requests_) {
      issued_.push_back(now);
      return;
    }
    clock_.sleep_for(issued_.front() + window_ - now);
  }
}

}  // namespace kgfuse
