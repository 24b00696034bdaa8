// Copyright 2026 The Sledger Authors
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

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "sledger/encoding.hpp"

namespace sledger {

enum class ValueType : std::uint8_t {
  string = 1,
  integer = 2,
  decimal = 3,
  boolean = 4,
  bytes = 5,
  reference = 6,
};

std::string_view value_type_name(ValueType type);
std::optional<ValueType> parse_value_type(std::string_view name);

struct Reference {
  std::string row;
  auto operator<=>(const Reference&) const = default;
};

// A typed field value. Variant order mirrors ValueType so the wire tag is
// index() + 1.
class Value {
 public:
  using Storage = std::variant<std::string, std::int64_t, double, bool, Bytes, Reference>;

  Value() = default;

  static Value string(std::string v) { return Value(Storage(std::in_place_index<0>, std::move(v))); }
  static Value integer(std::int64_t v) { return Value(Storage(std::in_place_index<1>, v)); }
  static Value decimal(double v) { return Value(Storage(std::in_place_index<2>, v)); }
  static Value boolean(bool v) { return Value(Storage(std::in_place_index<3>, v)); }
  static Value bytes(Bytes v) { return Value(Storage(std::in_place_index<4>, std::move(v))); }
  static Value reference(std::string row) {
    return Value(Storage(std::in_place_index<5>, Reference{std::move(row)}));
  }

  ValueType type() const { return static_cast<ValueType>(storage_.index() + 1); }
  const Storage& storage() const { return storage_; }

  const std::string& as_string() const { return std::get<0>(storage_); }
  std::int64_t as_integer() const { return std::get<1>(storage_); }
  double as_decimal() const { return std::get<2>(storage_); }
  bool as_boolean() const { return std::get<3>(storage_); }
  const Bytes& as_bytes() const { return std::get<4>(storage_); }
  const std::string& as_reference() const { return std::get<5>(storage_).row; }

  void encode(ByteWriter& w) const;
  static Value decode(ByteReader& r);
  Bytes encoded() const;
  static Value from_encoded(ByteView bytes);

  std::string display() const;

  bool operator==(const Value&) const = default;

 private:
  explicit Value(Storage s) : storage_(std::move(s)) {}
  Storage storage_;
};

// Identifiers used for table, row and field names: [A-Za-z0-9_-]{1,64}.
bool valid_identifier(std::string_view s);

// Addresses one field of one row. The schema path ("table.field") is what
// types and ACLs attach to; the state key ("table/row/field") is what the
// world state versions.
struct FieldKey {
  std::string table;
  std::string row;
  std::string field;

  std::string path() const { return table + "." + field; }
  std::string state_key() const { return table + "/" + row + "/" + field; }
  std::string row_prefix() const { return table + "/" + row + "/"; }

  static std::optional<FieldKey> parse_state_key(std::string_view key);

  auto operator<=>(const FieldKey&) const = default;
};

}  // namespace sledger
