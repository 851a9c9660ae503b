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

#ifndef KGFUSE_HTTP_BACKEND_H_
#define KGFUSE_HTTP_BACKEND_H_

#include <string>

#include "kgfuse/backend.h"

namespace kgfuse {

// Client for an OpenAI-style chat-completions endpoint. See
// docs/formats.md for the request and response bodies.
//
// Connection failures, timeouts, 408, 429 and 5xx responses are retried with
// exponential backoff (initial_backoff * 2^attempt, capped at one minute).
// 401, 403 and 404 are fatal. Any other failure fails the task.
class HttpLlmBackend final : public AlignmentBackend {
 public:
  // Reads the API key from the environment variable named in `config`; an
  // unset variable means no Authorization header.
  HttpLlmBackend(BackendConfig config, RateLimiter& limiter,
                 Clock& clock = system_clock());
  HttpLlmBackend(BackendConfig config, std::string api_key,
                 RateLimiter& limiter, Clock& clock = system_clock());

  RawResponse submit(const Prompt& prompt) override;

  // The JSON request body sent for `prompt`.
  std::string request_body(const Prompt& prompt) const;

 private:
  BackendConfig config_;
  std::string api_key_;
  std::string base_url_;
  std::string path_;
  RateLimiter& limiter_;
  Clock& clock_;
};

}  // namespace kgfuse

#endif  // KGFUSE_HTTP_BACKEND_H_
