// Copyright 2026 The roleeval Authors.
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

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace roleeval {

std::string_view trim_view(std::string_view s);
std::string trim(std::string_view s);
bool is_blank(std::string_view s);
std::string to_lower_ascii(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
std::size_t word_count(std::string_view s);

// Number of UTF-8 code points; invalid bytes count as one each.
std::size_t utf8_length(std::string_view s);

bool starts_with_icase(std::string_view s, std::string_view prefix);
bool contains_icase(std::string_view haystack, std::string_view needle);

// Replaces every {{NAME}} in `text` with values.at(NAME). Substituted text is
// not rescanned. Throws Error(kInvalidArgument) for a placeholder that has no
// value.
std::string fill_placeholders(std::string_view text,
                              const std::map<std::string, std::string>& values);

// The fixed text between placeholders, in order.
std::vector<std::string> literal_segments(std::string_view text);

std::string sha256_hex(std::string_view data);

// "<prefix>-<first n hex chars of sha256(joined parts)>".
std::string short_id(std::string_view prefix, const std::vector<std::string>& parts,
                     std::size_t hex_chars = 12);

// English word for small counts ("ten"); decimal digits otherwise.
std::string count_word(std::size_t n);

}  // namespace roleeval
