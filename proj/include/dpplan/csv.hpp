// Copyright 2026 The dpplan Authors
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

#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "dpplan/core.hpp"
#include "dpplan/datum.hpp"
#include "dpplan/plan.hpp"

namespace dpplan {

struct IoError : Error {
  using Error::Error;
};

/// CSV cell failed to parse; carries the 1-based line number.
struct ParseError : Error {
  ParseError(const std::string& msg, int line_)
      : Error(msg + " (line " + std::to_string(line_) + ")"), line(line_) {}
  int line;
};

enum class ColumnType { kInteger, kReal, kText };

/// Declared column layout of a CSV table. The header row must name exactly
/// these columns, in order.
struct Schema {
  std::vector<std::pair<std::string, ColumnType>> columns;

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].first == name) return static_cast<int>(i);
    throw ContractError("schema has no column named '" + name + "'");
  }
};

/// Selector reading a named column out of a loaded row.
inline RowMapper column(const Schema& schema, const std::string& name) {
  int idx = schema.index_of(name);
  return [idx](const Datum& row) { return row.as_list()[idx]; };
}

namespace detail {

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline Datum parse_cell(const std::string& text, ColumnType type,
                        const std::string& col, int line) {
  switch (type) {
    case ColumnType::kInteger: {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || p != text.data() + text.size())
        throw ParseError("column '" + col + "': '" + text +
                             "' is not an integer",
                         line);
      return Datum(v);
    }
    case ColumnType::kReal: {
      double v = 0.0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || p != text.data() + text.size())
        throw ParseError(
            "column '" + col + "': '" + text + "' is not a real number", line);
      return Datum(v);
    }
    case ColumnType::kText:
      return Datum(text);
  }
  throw ParseError("unknown column type", line);
}

}  // namespace detail

/// Load a strict headered CSV against a schema. Wrong arity or an
/// unparsable cell fails with the offending line number; a missing file is
/// an I/O error; a file with only the header is an empty (valid) dataset.
inline std::vector<Datum> load_csv(const std::string& path,
                                   const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line))
    throw ParseError("missing header row in '" + path + "'", 1);
  std::vector<std::string> header = detail::split_line(line);
  if (header.size() != schema.columns.size())
    throw ParseError("header has " + std::to_string(header.size()) +
                         " columns, expected " +
                         std::to_string(schema.columns.size()),
                     1);
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] != schema.columns[i].first)
      throw ParseError("header column " + std::to_string(i + 1) + " is '" +
                           header[i] + "', expected '" +
                           schema.columns[i].first + "'",
                       1);

  std::vector<Datum> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells = detail::split_line(line);
    if (cells.size() != schema.columns.size())
      throw ParseError("row has " + std::to_string(cells.size()) +
                           " fields, expected " +
                           std::to_string(schema.columns.size()),
                       lineno);
    Datum::List fields;
    fields.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
      fields.push_back(detail::parse_cell(cells[i], schema.columns[i].second,
                                          schema.columns[i].first, lineno));
    rows.push_back(Datum(std::move(fields)));
  }
  return rows;
}

/// Shortest decimal representation that round-trips the double.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, p);
}

/// Write rows of preformatted cells under a header. Overwrites the target.
inline void write_csv(const std::string& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << row[i];
    out << "\n";
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace dpplan
