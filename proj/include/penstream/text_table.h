// Copyright 2026 The Penstream Authors
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

// Delimited text tables (tab or comma separated, header row first) and the
// number formatting shared by every report writer.

#ifndef PENSTREAM_TEXT_TABLE_H_
#define PENSTREAM_TEXT_TABLE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace penstream {

// Maps a local column name to the canonical name it stands for.
using ColumnAliases = std::map<std::string, std::string>;

struct TextTable {
  char delimiter = '\t';
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  // Locates a column. Exact name wins over a case-insensitive match, which
  // wins over an alias match.
  std::optional<std::size_t> find(std::string_view name,
                                  const ColumnAliases &aliases = {}) const;
  // Same as find(), but throws MissingColumn.
  std::size_t require(std::string_view name,
                      const ColumnAliases &aliases = {}) const;
};

// Tab when the header line contains a tab, comma otherwise.
char detect_delimiter(std::string_view header_line);

// Parses a header row plus data rows. Blank lines are skipped; every data row
// must have exactly as many fields as the header (MalformedRow otherwise).
// Throws EmptyReport when there is no header.
TextTable parse_table(std::string_view text);

std::string write_table(const std::vector<std::string> &header,
                        const std::vector<std::vector<std::string>> &rows,
                        char delimiter = '\t');

// Shortest representation that parses back to the identical double.
std::string format_double(double value);
// Rounds to `decimals` places and drops trailing zeros ("6.900" -> "6.9").
std::string format_fixed(double value, int decimals);

std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace penstream

#endif  // PENSTREAM_TEXT_TABLE_H_
