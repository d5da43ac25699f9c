/*
 * Copyright 2026 The ehrflow Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EHRFLOW_CSV_H_
#define EHRFLOW_CSV_H_

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ehrflow {

// A CSV file with a header row. Cells are kept as raw text; the empty string
// is the null marker.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of `name` in the header, or -1.
  int ColumnIndex(std::string_view name) const;
};

// RFC 4180 parsing: quoted fields, doubled quotes, CRLF or LF line endings.
// Short rows are padded with empty cells; long rows are a ParseError.
CsvTable ParseCsv(std::string_view text);
CsvTable ReadCsv(const std::filesystem::path& path);

void WriteCsvRow(std::ostream& out, const std::vector<std::string>& fields);
void WriteCsv(const std::filesystem::path& path, const CsvTable& table);

// Shortest text that round-trips the double exactly ("%.17g" style).
std::string FormatDouble(double value);

}  // namespace ehrflow

#endif  // EHRFLOW_CSV_H_
