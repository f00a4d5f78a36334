// Copyright 2026 The Blender Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal RFC 4180 CSV reading and writing.

#ifndef BLENDER_CSV_HPP_
#define BLENDER_CSV_HPP_

#include <initializer_list>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"

namespace blender {

inline std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string CsvRow(std::span<const std::string> fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += CsvField(fields[i]);
  }
  out += '\n';
  return out;
}

inline std::string CsvRow(std::initializer_list<std::string> fields) {
  return CsvRow(std::span<const std::string>(fields.begin(), fields.size()));
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  absl::StatusOr<size_t> Column(std::string_view name) const {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return absl::NotFoundError(absl::StrCat("missing CSV column '", AbslView(name), "'"));
  }

  absl::StatusOr<double> Double(size_t row, size_t column) const {
    double v;
    if (!absl::SimpleAtod(rows[row][column], &v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("CSV row ", row + 2, ": '", rows[row][column],
                       "' is not a number"));
    }
    return v;
  }
};

/// Reads a CSV with a header row. Quoted fields may span lines.
inline absl::StatusOr<CsvTable> ReadCsv(std::istream& is) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    if (table.header.empty() && table.rows.empty()) {
      table.header = std::move(record);
    } else if (!(record.size() == 1 && record[0].empty())) {
      table.rows.push_back(std::move(record));
    }
    record.clear();
    any = false;
  };
  while (is.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (in_quotes) return absl::InvalidArgumentError("unterminated CSV quote");
  if (any) end_record();
  for (size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != table.header.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("CSV row ", i + 2, " has ", table.rows[i].size(),
                       " fields, header has ", table.header.size()));
    }
  }
  return table;
}

}  // namespace blender

#endif  // BLENDER_CSV_HPP_
