// Copyright 2026 The parity-meter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PARITY_METER_CSV_HPP_
#define PARITY_METER_CSV_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace parity {

// Minimal comma-separated table: header row plus string cells. No quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

// SchemaError on an empty stream or a row whose width differs from the header.
CsvTable read_csv(std::istream& in);

// Shortest representation that parses back to the same double.
std::string format_double(double value);

// Strict full-cell parses; std::nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view cell);
std::optional<long long> parse_integer(std::string_view cell);

}  // namespace parity

#endif  // PARITY_METER_CSV_HPP_
