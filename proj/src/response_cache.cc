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

#include "kgfuse/response_cache.h"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include <fmt/format.h>
#include <json.hpp>

#include "kgfuse/errors.h"

namespace kgfuse {
namespace {

using json = nlohmann::json;

void append_field(std::string& buf, std::string_view field) {
  buf += std::to_string(field.size());
  buf += ':';
  buf += field;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex += fmt::format("{:02x}", digest[i]);
  }
  return hex;
}

std::string cache_key(const Prompt& prompt, const BackendConfig& config) {
  std::string buf;
  buf.reserve(prompt.system.size() + prompt.user.size() + 64);
  append_field(buf, "kgfuse-cache-v1");
  append_field(buf, config.model_name);
  append_field(buf, fmt::format("{}", config.temperature));
  append_field(buf, prompt.system);
  append_field(buf, prompt.user);
  return sha256_hex(buf);
}

ResponseCache::ResponseCache(std::filesystem::path file) {
  if (file.has_parent_path()) {
    std::filesystem::create_directories(file.parent_path());
  }
  if (std::ifstream in(file); in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto entry = json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (entry.is_discarded() || !entry.contains("key") ||
          !entry.contains("text") || !entry["key"].is_string() ||
          !entry["text"].is_string()) {
        ++skipped_lines_;
        continue;
      }
      entries_[entry["key"].get<std::string>()] =
          Entry{entry["text"].get<std::string>(),
                entry.value("truncated", false)};
    }
  }
  out_.open(file, std::ios::app | std::ios::binary);
  if (!out_) {
    throw DataError(fmt::format("cannot open cache file {}", file.string()));
  }
  // A torn last line must not swallow the next entry.
  out_ << '\n';
  out_.flush();
}

std::optional<RawResponse> ResponseCache::find(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  RawResponse response;
  response.text = it->second.text;
  response.truncated_hint = it->second.truncated;
  response.cache_hit = true;
  return response;
}

void ResponseCache::insert(const std::string& key, const RawResponse& response,
                           std::string_view model_name) {
  std::lock_guard lock(mu_);
  entries_[key] = Entry{response.text, response.truncated_hint};
  if (out_.is_open()) {
    json line = {{"key", key},
                 {"model", model_name},
                 {"truncated", response.truncated_hint},
                 {"text", response.text}};
    out_ << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    out_.flush();
  }
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

CachingBackend::CachingBackend(AlignmentBackend& inner, ResponseCache& cache,
                               BackendConfig config)
    : inner_(inner), cache_(cache), config_(std::move(config)) {}

RawResponse CachingBackend::submit(const Prompt& prompt) {
  const auto key = cache_key(prompt, config_);
  if (auto cached = cache_.find(key)) {
    ++hits_;
    return *cached;
  }
  ++misses_;
  RawResponse response = inner_.submit(prompt);
  cache_.insert(key, response, config_.model_name);
  response.cache_hit = false;
  return response;
}

}  // namespace kgfuse
