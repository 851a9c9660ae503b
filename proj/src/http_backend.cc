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

#include "kgfuse/http_backend.h"

#include <algorithm>
#include <cstdlib>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "kgfuse/errors.h"

namespace kgfuse {
namespace {

using json = nlohmann::json;

constexpr auto kMaxBackoff = std::chrono::minutes(1);

struct SplitUrl {
  std::string base;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError(fmt::format("endpoint '{}' is not an absolute URL", url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string env_or_empty(const std::string& name) {
  if (name.empty()) return {};
  const char* value = std::getenv(name.c_str());
  return value == nullptr ? std::string() : std::string(value);
}

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

bool fatal_status(int status) {
  return status == 401 || status == 403 || status == 404;
}

}  // namespace

HttpLlmBackend::HttpLlmBackend(BackendConfig config, RateLimiter& limiter,
                               Clock& clock)
    : HttpLlmBackend(config, env_or_empty(config.api_key_env), limiter,
                     clock) {}

HttpLlmBackend::HttpLlmBackend(BackendConfig config, std::string api_key,
                               RateLimiter& limiter, Clock& clock)
    : config_(std::move(config)),
      api_key_(std::move(api_key)),
      limiter_(limiter),
      clock_(clock) {
  validate(config_);
  auto url = split_url(config_.endpoint);
  base_url_ = std::move(url.base);
  path_ = std::move(url.path);
}

std::string HttpLlmBackend::request_body(const Prompt& prompt) const {
  json body = {
      {"model", config_.model_name},
      {"temperature", config_.temperature},
      {"max_tokens", config_.max_output_tokens},
      {"messages",
       json::array({{{"role", "system"}, {"content", prompt.system}},
                    {{"role", "user"}, {"content", prompt.user}}})},
  };
  return body.dump();
}

RawResponse HttpLlmBackend::submit(const Prompt& prompt) {
  const std::string body = request_body(prompt);
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key_);
  }

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      auto backoff = config_.initial_backoff * (1LL << std::min(attempt - 1, 20));
      clock_.sleep_for(std::min<Clock::duration>(backoff, kMaxBackoff));
    }
    limiter_.acquire();

    httplib::Client client(base_url_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);

    const auto start = clock_.now();
    auto result = client.Post(path_, headers, body, "application/json");
    const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        clock_.now() - start);

    if (!result) {
      last_error = fmt::format("request to {} failed: {}", config_.endpoint,
                               httplib::to_string(result.error()));
      continue;
    }
    const int status = result->status;
    if (fatal_status(status)) {
      throw BackendError(
          fmt::format("{} answered HTTP {}: {}", config_.endpoint, status,
                      result->body.substr(0, 200)),
          /*fatal=*/true);
    }
    if (retryable_status(status)) {
      last_error = fmt::format("{} answered HTTP {}", config_.endpoint, status);
      continue;
    }
    if (status < 200 || status >= 300) {
      throw BackendError(
          fmt::format("{} answered HTTP {}: {}", config_.endpoint, status,
                      result->body.substr(0, 200)),
          /*fatal=*/false);
    }

    auto parsed = json::parse(result->body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded() || !parsed.contains("choices") ||
        !parsed["choices"].is_array() || parsed["choices"].empty()) {
      last_error = "response body has no choices";
      continue;
    }
    const auto& choice = parsed["choices"][0];
    RawResponse response;
    response.latency = latency;
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      response.text = choice["message"]["content"].get<std::string>();
    }
    if (choice.contains("finish_reason") &&
        choice["finish_reason"].is_string()) {
      response.truncated_hint = choice["finish_reason"] == "length";
    }
    return response;
  }
  throw BackendError(fmt::format("giving up after {} attempts: {}",
                                 config_.max_retries + 1, last_error),
                     /*fatal=*/false);
}

}  // namespace kgfuse
