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

// Persistent response cache keyed by a digest of everything that determines
// a model's answer. The on-disk form is JSON Lines, one entry per line:
//
//   {"key":"<sha256 hex>","model":"<name>","truncated":false,"text":"..."}
//
// Entries are appended and flushed one at a time; a torn final line from an
// interrupted run is skipped on load.

#ifndef KGFUSE_RESPONSE_CACHE_H_
#define KGFUSE_RESPONSE_CACHE_H_

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "kgfuse/backend.h"

namespace kgfuse {

std::string sha256_hex(std::string_view data);

// SHA-256 over the length-prefixed model name, temperature, system text and
// user text. Stable across processes and platforms.
std::string cache_key(const Prompt& prompt, const BackendConfig& config);

class ResponseCache {
 public:
  // In-memory only.
  ResponseCache() = default;
  // Loads `file` if it exists; new entries are appended to it.
  explicit ResponseCache(std::filesystem::path file);

  ResponseCache(const ResponseCache&) = delete;
  ResponseCache& operator=(const ResponseCache&) = delete;

  std::optional<RawResponse> find(const std::string& key) const;
  void insert(const std::string& key, const RawResponse& response,
              std::string_view model_name = {});

  std::size_t size() const;
  // Lines that could not be parsed while loading.
  std::size_t skipped_lines() const { return skipped_lines_; }

 private:
  struct Entry {
    std::string text;
    bool truncated = false;
  };

  mutable std::mutex mu_;
  std::unordered_map<std::string, Entry> entries_;
  std::ofstream out_;
  std::size_t skipped_lines_ = 0;
};

// Serves repeated prompts from a ResponseCache and records new answers.
class CachingBackend final : public AlignmentBackend {
 public:
  CachingBackend(AlignmentBackend& inner, ResponseCache& cache,
                 BackendConfig config);

  RawResponse submit(const Prompt& prompt) override;

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  AlignmentBackend& inner_;
  ResponseCache& cache_;
  BackendConfig config_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace kgfuse

#endif  // KGFUSE_RESPONSE_CACHE_H_
