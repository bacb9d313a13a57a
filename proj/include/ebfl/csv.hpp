// Copyright 2026 The ebfl Authors
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

#ifndef EBFL_CSV_HPP_
#define EBFL_CSV_HPP_

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ebfl/error.hpp"

namespace ebfl::csv {

// Splits one unquoted comma-separated record. Fields are not trimmed except
// for a trailing '\r'.
inline std::vector<std::string_view> split(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline double parse_double(std::string_view field, std::size_t line,
                           std::string_view column) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError("column '" + std::string(column) +
                         "': not a number: '" + std::string(field) + "'",
                     line);
  }
  return value;
}

inline long long parse_int(std::string_view field, std::size_t line,
                           std::string_view column) {
  long long value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError("column '" + std::string(column) +
                         "': not an integer: '" + std::string(field) + "'",
                     line);
  }
  return value;
}

}  // namespace ebfl::csv

#endif  // EBFL_CSV_HPP_
