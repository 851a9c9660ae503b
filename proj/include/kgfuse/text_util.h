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

// Small string helpers shared by the file readers and writers.

#ifndef KGFUSE_TEXT_UTIL_H_
#define KGFUSE_TEXT_UTIL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgfuse {

// Views into `line`; valid as long as `line` is.
std::vector<std::string_view> split_tabs(std::string_view line);
std::vector<std::string_view> split_lines(std::string_view text);

void strip_cr(std::string& line);

std::optional<std::uint32_t> parse_u32(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// Backslash escaping of '\\', '\t', '\n' and '\r' for tab-separated fields.
std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);

// %XX sequences become bytes; malformed sequences are kept verbatim.
std::string percent_decode(std::string_view s);

std::string replace_all(std::string text, std::string_view from,
                        std::string_view to);

}  // namespace kgfuse

#endif  // KGFUSE_TEXT_UTIL_H_
