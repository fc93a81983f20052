// Copyright 2026 The DiADEM Authors. All Rights Reserved.
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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace diadem::csv {

/// A parsed CSV table: one header row followed by records.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based line number of each record's first line in the source file.
  std::vector<std::size_t> line_numbers;

  /// Index of `name` in the header, or npos.
  std::size_t column(std::string_view name) const;
};

/// RFC-4180 reader: comma separated, double-quote quoting with "" escapes,
/// quoted fields may span lines. A UTF-8 BOM and CRLF line endings are
/// tolerated. Throws Error(kIoError) on unreadable input or unterminated
/// quotes, and Error(kInconsistentWidth) on ragged rows.
Table read(std::istream& in);
Table read_file(const std::filesystem::path& path);

/// Quotes a field only when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace diadem::csv
