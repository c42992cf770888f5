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

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dpplan {

/// Dynamic row value. Rows flowing through a plan are engine-opaque; user
/// code addresses them only through selector callables. A Datum is either a
/// scalar cell (integer, real, text) or a list of Datums, which covers CSV
/// records, composite keys, and grouped rows alike.
class Datum {
 public:
  using List = std::vector<Datum>;

  Datum() : v_(std::int64_t{0}) {}
  Datum(std::int64_t v) : v_(v) {}
  Datum(int v) : v_(static_cast<std::int64_t>(v)) {}
  Datum(double v) : v_(v) {}
  Datum(std::string v) : v_(std::move(v)) {}
  Datum(const char* v) : v_(std::string(v)) {}
  Datum(List v) : v_(std::make_shared<const List>(std::move(v))) {}

  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_real() const { return std::holds_alternative<double>(v_); }
  bool is_text() const { return std::holds_alternative<std::string>(v_); }
  bool is_list() const {
    return std::holds_alternative<std::shared_ptr<const List>>(v_);
  }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  double as_real() const { return std::get<double>(v_); }
  const std::string& as_text() const { return std::get<std::string>(v_); }
  const List& as_list() const {
    return *std::get<std::shared_ptr<const List>>(v_);
  }

  /// Numeric view: integer cells widen to double.
  double numeric() const {
    if (is_int()) return static_cast<double>(as_int());
    return as_real();
  }

  friend bool operator==(const Datum& a, const Datum& b) {
    if (a.v_.index() != b.v_.index()) return false;
    if (a.is_list()) return a.as_list() == b.as_list();
    return a.v_ == b.v_;
  }

  // Total order: by alternative index first, then by value; lists compare
  // lexicographically. Used for partition keys and result-map ordering.
  friend bool operator<(const Datum& a, const Datum& b) {
    if (a.v_.index() != b.v_.index()) return a.v_.index() < b.v_.index();
    if (a.is_list()) {
      const List& la = a.as_list();
      const List& lb = b.as_list();
      return std::lexicographical_compare(la.begin(), la.end(), lb.begin(),
                                          lb.end());
    }
    return a.v_ < b.v_;
  }

  std::string to_string() const {
    if (is_int()) return std::to_string(as_int());
    if (is_real()) return std::to_string(as_real());
    if (is_text()) return as_text();
    std::string out = "(";
    const List& l = as_list();
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (i) out += ",";
      out += l[i].to_string();
    }
    out += ")";
    return out;
  }

 private:
  std::variant<std::int64_t, double, std::string, std::shared_ptr<const List>>
      v_;
};

}  // namespace dpplan
