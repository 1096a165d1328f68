/*
 * Copyright 2026 The reclab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reclab {

// Shortest round-trip decimal form of a double ("nan"/"inf" for
// non-finite values). Locale independent.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

std::optional<double> parse_optional_double(std::string_view field);

// Minimal comma-separated table. Fields never contain commas or quotes in
// this project, so no quoting is performed.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or throws InvalidInput.
  std::size_t column(std::string_view name) const;
};

void write_csv_row(std::ostream& out, std::span<const std::string> fields);
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

}  // namespace reclab
