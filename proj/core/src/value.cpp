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

#include "sledger/value.hpp"

#include <cmath>

#include <fmt/format.h>

#include "sledger/error.hpp"

namespace sledger {

std::string_view value_type_name(ValueType type) {
  switch (type) {
    case ValueType::string: return "string";
    case ValueType::integer: return "integer";
    case ValueType::decimal: return "decimal";
    case ValueType::boolean: return "boolean";
    case ValueType::bytes: return "bytes";
    case ValueType::reference: return "reference";
  }
  return "unknown";
}

std::optional<ValueType> parse_value_type(std::string_view name) {
  for (auto t : {ValueType::string, ValueType::integer, ValueType::decimal,
                 ValueType::boolean, ValueType::bytes, ValueType::reference}) {
    if (value_type_name(t) == name) return t;
  }
  return std::nullopt;
}

void Value::encode(ByteWriter& w) const {
  w.u8(static_cast<std::uint8_t>(type()));
  std::visit(
      [&w](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          w.str(v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          w.i64(v);
        } else if constexpr (std::is_same_v<T, double>) {
          w.f64(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          w.boolean(v);
        } else if constexpr (std::is_same_v<T, Bytes>) {
          w.bytes(v);
        } else {
          w.str(v.row);
        }
      },
      storage_);
}

Value Value::decode(ByteReader& r) {
  switch (static_cast<ValueType>(r.u8())) {
    case ValueType::string: return string(r.str());
    case ValueType::integer: return integer(r.i64());
    case ValueType::decimal: return decimal(r.f64());
    case ValueType::boolean: return boolean(r.boolean());
    case ValueType::bytes: return bytes(r.bytes());
    case ValueType::reference: return reference(r.str());
  }
  throw Error(Errc::decode_error, "unknown value type tag");
}

Bytes Value::encoded() const {
  ByteWriter w;
  encode(w);
  return w.take();
}

Value Value::from_encoded(ByteView bytes) {
  ByteReader r(bytes);
  auto v = decode(r);
  r.expect_end();
  return v;
}

std::string Value::display() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return fmt::format("\"{}\"", v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return fmt::format("{}", v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, Bytes>) {
          return "0x" + to_hex(v);
        } else {
          return "@" + v.row;
        }
      },
      storage_);
}

bool valid_identifier(std::string_view s) {
  if (s.empty() || s.size() > 64) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::optional<FieldKey> FieldKey::parse_state_key(std::string_view key) {
  auto a = key.find('/');
  if (a == std::string_view::npos) return std::nullopt;
  auto b = key.find('/', a + 1);
  if (b == std::string_view::npos) return std::nullopt;
  FieldKey k{std::string(key.substr(0, a)), std::string(key.substr(a + 1, b - a - 1)),
             std::string(key.substr(b + 1))};
  if (!valid_identifier(k.table) || !valid_identifier(k.row) || !valid_identifier(k.field)) {
    return std::nullopt;
  }
  return k;
}

}  // namespace sledger
