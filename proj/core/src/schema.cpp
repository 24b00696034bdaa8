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

#include "sledger/schema.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "json.hpp"

namespace sledger::schema {
namespace {

using nlohmann::json;

std::string join_diagnostics(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    if (!out.empty()) out += "\n";
    out += d.str();
  }
  return out;
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

PrincipalSet parse_principals(const json& j, const std::string& path,
                              std::vector<Diagnostic>& diags) {
  PrincipalSet set;
  if (j.is_string() && j.get<std::string>() == "public") {
    set.is_public = true;
    return set;
  }
  if (!j.is_array()) {
    diags.push_back({path, "expected \"public\" or an array of principal ids"});
    return set;
  }
  for (const auto& p : j) {
    if (!p.is_string()) {
      diags.push_back({path, "principal ids must be strings"});
      continue;
    }
    auto id = p.get<std::string>();
    if (id == "public") {
      set.is_public = true;
    } else {
      set.principals.insert(id);
    }
  }
  return set;
}

json principals_json(const PrincipalSet& set) {
  if (set.is_public) return "public";
  json arr = json::array();
  for (const auto& p : set.principals) arr.push_back(p);
  return arr;
}

void encode_principals(ByteWriter& w, const PrincipalSet& set) {
  w.boolean(set.is_public).u32(static_cast<std::uint32_t>(set.principals.size()));
  for (const auto& p : set.principals) w.str(p);
}

}  // namespace

std::string PrincipalSet::display() const {
  if (is_public) return "public";
  std::string out;
  for (const auto& p : principals) {
    if (!out.empty()) out += ",";
    out += p;
  }
  return out;
}

SchemaError::SchemaError(std::vector<Diagnostic> diagnostics)
    : Error(Errc::schema_error, join_diagnostics(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

SchemaDoc SchemaDoc::parse(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw SchemaError(std::vector<Diagnostic>{
        Diagnostic{"<document>", fmt::format("line {} column {}: {}", line, col, e.what())}});
  }

  std::vector<Diagnostic> diags;
  SchemaDoc doc;
  if (!root.is_object()) {
    throw SchemaError(
        std::vector<Diagnostic>{Diagnostic{"<document>", "schema document must be a JSON object"}});
  }
  for (const auto& [key, _] : root.items()) {
    if (key != "tables" && key != "default_acl" && key != "description" && key != "$schema") {
      diags.push_back({key, "unknown top-level keyword"});
    }
  }
  if (!root.contains("tables") || !root["tables"].is_array()) {
    throw SchemaError(
        std::vector<Diagnostic>{Diagnostic{"tables", "required array of table definitions"}});
  }

  const auto& tables = root["tables"];
  for (std::size_t ti = 0; ti < tables.size(); ++ti) {
    const auto& t = tables[ti];
    const auto tpath = fmt::format("tables[{}]", ti);
    if (!t.is_object() || !t.contains("name") || !t["name"].is_string()) {
      diags.push_back({tpath, "table needs a string 'name'"});
      continue;
    }
    TableDef table;
    table.name = t["name"].get<std::string>();
    if (!t.contains("fields") || !t["fields"].is_array()) {
      diags.push_back({table.name, "table needs a 'fields' array"});
      continue;
    }
    const auto& fields = t["fields"];
    for (std::size_t fi = 0; fi < fields.size(); ++fi) {
      const auto& f = fields[fi];
      const auto fpath = fmt::format("{}.fields[{}]", table.name, fi);
      if (!f.is_object() || !f.contains("name") || !f["name"].is_string()) {
        diags.push_back({fpath, "field needs a string 'name'"});
        continue;
      }
      FieldDef field;
      field.name = f["name"].get<std::string>();
      const auto path = table.name + "." + field.name;
      for (const auto& [key, value] : f.items()) {
        try {
          if (key == "name" || key == "description") {
            continue;
          } else if (key == "type") {
            field.type = value.get<std::string>();
          } else if (key == "required") {
            field.required = value.get<bool>();
          } else if (key == "minimum") {
            field.constraints.minimum = value.get<double>();
          } else if (key == "maximum") {
            field.constraints.maximum = value.get<double>();
          } else if (key == "minLength") {
            field.constraints.min_length = value.get<std::uint32_t>();
          } else if (key == "maxLength") {
            field.constraints.max_length = value.get<std::uint32_t>();
          } else if (key == "pattern") {
            field.constraints.pattern = value.get<std::string>();
          } else if (key == "table") {
            field.constraints.reference_table = value.get<std::string>();
          } else {
            diags.push_back({path, fmt::format("unknown keyword '{}'", key)});
          }
        } catch (const json::exception&) {
          diags.push_back({path, fmt::format("keyword '{}' has the wrong JSON type", key)});
        }
      }
      if (field.type.empty()) diags.push_back({path, "field needs a 'type'"});
      table.fields.push_back(std::move(field));
    }
    doc.tables.push_back(std::move(table));
  }

  if (root.contains("default_acl")) {
    const auto& acl = root["default_acl"];
    if (!acl.is_object()) {
      diags.push_back({"default_acl", "must be an object keyed by field path"});
    } else {
      for (const auto& [path, spec] : acl.items()) {
        DefaultAcl entry;
        if (!spec.is_object()) {
          diags.push_back({path, "ACL entry must be an object with read/write"});
          continue;
        }
        for (const auto& [mode, principals] : spec.items()) {
          if (mode == "read") {
            entry.read = parse_principals(principals, path + ".read", diags);
          } else if (mode == "write") {
            entry.write = parse_principals(principals, path + ".write", diags);
          } else {
            diags.push_back({path, fmt::format("unknown ACL mode '{}'", mode)});
          }
        }
        doc.default_acl[path] = std::move(entry);
      }
    }
  }

  if (!diags.empty()) throw SchemaError(std::move(diags));
  return doc;
}

std::string SchemaDoc::to_json() const {
  json root;
  json tables_json = json::array();
  for (const auto& t : tables) {
    json fields = json::array();
    for (const auto& f : t.fields) {
      json fj;
      fj["name"] = f.name;
      fj["type"] = f.type;
      if (f.required) fj["required"] = true;
      const auto& c = f.constraints;
      if (c.minimum) fj["minimum"] = *c.minimum;
      if (c.maximum) fj["maximum"] = *c.maximum;
      if (c.min_length) fj["minLength"] = *c.min_length;
      if (c.max_length) fj["maxLength"] = *c.max_length;
      if (c.pattern) fj["pattern"] = *c.pattern;
      if (!c.reference_table.empty()) fj["table"] = c.reference_table;
      fields.push_back(std::move(fj));
    }
    tables_json.push_back({{"name", t.name}, {"fields", std::move(fields)}});
  }
  root["tables"] = std::move(tables_json);
  json acl = json::object();
  for (const auto& [path, entry] : default_acl) {
    json e = json::object();
    if (entry.read) e["read"] = principals_json(*entry.read);
    if (entry.write) e["write"] = principals_json(*entry.write);
    acl[path] = std::move(e);
  }
  root["default_acl"] = std::move(acl);
  return root.dump(2);
}

// ---------------------------------------------------------------------------

const FieldSpec* CompiledChainSpec::find(std::string_view path) const {
  auto it = fields_.find(std::string(path));
  return it == fields_.end() ? nullptr : &it->second;
}

const std::vector<std::string>& CompiledChainSpec::table_fields(std::string_view table) const {
  static const std::vector<std::string> kEmpty;
  auto it = tables_.find(std::string(table));
  return it == tables_.end() ? kEmpty : it->second;
}

std::vector<std::string> CompiledChainSpec::tables() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : tables_) out.push_back(name);
  return out;
}

Bytes CompiledChainSpec::canonical_registry() const {
  ByteWriter w;
  w.str("sledger.schema.v1").u32(static_cast<std::uint32_t>(fields_.size()));
  for (const auto& [path, f] : fields_) {
    w.str(path).u8(static_cast<std::uint8_t>(f.type)).boolean(f.required);
    const auto& c = f.constraints;
    w.boolean(c.minimum.has_value()).f64(c.minimum.value_or(0.0));
    w.boolean(c.maximum.has_value()).f64(c.maximum.value_or(0.0));
    w.boolean(c.min_length.has_value()).u32(c.min_length.value_or(0));
    w.boolean(c.max_length.has_value()).u32(c.max_length.value_or(0));
    w.boolean(c.pattern.has_value()).str(c.pattern.value_or(""));
    w.str(c.reference_table);
    encode_principals(w, f.readers);
    encode_principals(w, f.writers);
  }
  return w.take();
}

CompiledChainSpec compile_schema(const SchemaDoc& doc) {
  std::vector<Diagnostic> diags;
  CompiledChainSpec spec;

  std::set<std::string> table_names;
  for (const auto& t : doc.tables) {
    if (!valid_identifier(t.name)) {
      diags.push_back({t.name, "table name must match [A-Za-z0-9_-]{1,64}"});
    }
    if (!table_names.insert(t.name).second) {
      diags.push_back({t.name, "duplicate table name"});
    }
    if (t.fields.empty()) diags.push_back({t.name, "table has no fields"});
  }

  auto resolve_acl = [&doc](const std::string& table, const std::string& field,
                            auto member) -> PrincipalSet {
    auto exact = doc.default_acl.find(table + "." + field);
    if (exact != doc.default_acl.end() && (exact->second.*member)) {
      return *(exact->second.*member);
    }
    auto wild = doc.default_acl.find(table + ".*");
    if (wild != doc.default_acl.end() && (wild->second.*member)) {
      return *(wild->second.*member);
    }
    return {};
  };

  for (const auto& t : doc.tables) {
    std::set<std::string> field_names;
    auto& order = spec.tables_[t.name];
    for (const auto& f : t.fields) {
      const auto path = t.name + "." + f.name;
      if (!valid_identifier(f.name)) {
        diags.push_back({path, "field name must match [A-Za-z0-9_-]{1,64}"});
      }
      if (!field_names.insert(f.name).second) {
        diags.push_back({path, "duplicate field name"});
        continue;
      }
      auto type = parse_value_type(f.type);
      if (!type) {
        diags.push_back({path, fmt::format("unsupported type '{}'", f.type)});
        continue;
      }
      FieldSpec fs;
      fs.type = *type;
      fs.required = f.required;
      fs.constraints = f.constraints;
      const auto& c = fs.constraints;
      const bool numeric = *type == ValueType::integer || *type == ValueType::decimal;
      const bool sized = *type == ValueType::string || *type == ValueType::bytes;
      if ((c.minimum || c.maximum) && !numeric) {
        diags.push_back({path, "minimum/maximum only apply to integer and decimal fields"});
      }
      if ((c.min_length || c.max_length) && !sized) {
        diags.push_back({path, "minLength/maxLength only apply to string and bytes fields"});
      }
      if (c.pattern && *type != ValueType::string) {
        diags.push_back({path, "pattern only applies to string fields"});
      }
      if (c.minimum && c.maximum && *c.minimum > *c.maximum) {
        diags.push_back({path, "minimum exceeds maximum"});
      }
      if (c.min_length && c.max_length && *c.min_length > *c.max_length) {
        diags.push_back({path, "minLength exceeds maxLength"});
      }
      if (*type == ValueType::reference) {
        if (c.reference_table.empty()) {
          diags.push_back({path, "reference field needs a 'table'"});
        } else if (!table_names.contains(c.reference_table)) {
          diags.push_back({path, fmt::format("dangling reference to unknown table '{}'",
                                             c.reference_table)});
        }
      } else if (!c.reference_table.empty()) {
        diags.push_back({path, "'table' only applies to reference fields"});
      }
      if (c.pattern) {
        try {
          fs.compiled_pattern = std::make_shared<const std::regex>(*c.pattern);
        } catch (const std::regex_error& e) {
          diags.push_back({path, fmt::format("invalid pattern: {}", e.what())});
        }
      }
      fs.readers = resolve_acl(t.name, f.name, &DefaultAcl::read);
      fs.writers = resolve_acl(t.name, f.name, &DefaultAcl::write);
      spec.fields_.emplace(path, std::move(fs));
      order.push_back(f.name);
    }
  }

  for (const auto& [path, entry] : doc.default_acl) {
    auto dot = path.find('.');
    bool ok = dot != std::string::npos;
    if (ok) {
      auto table = path.substr(0, dot);
      auto field = path.substr(dot + 1);
      ok = field == "*" ? table_names.contains(table) : spec.fields_.contains(path);
    }
    if (!ok) diags.push_back({path, "ACL path does not resolve to a field or table.*"});
    for (const auto* set : {&entry.read, &entry.write}) {
      if (!*set) continue;
      for (const auto& p : (*set)->principals) {
        if (!valid_identifier(p)) {
          diags.push_back({path, fmt::format("invalid principal id '{}'", p)});
        }
      }
    }
  }

  if (!diags.empty()) throw SchemaError(std::move(diags));
  spec.digest_ = hash_content(spec.canonical_registry());
  spec.schema_json_ = doc.to_json();
  return spec;
}

CompiledChainSpec compile_schema_json(std::string_view json_text) {
  return compile_schema(SchemaDoc::parse(json_text));
}

std::vector<Diagnostic> check_additive(const CompiledChainSpec& current,
                                       const CompiledChainSpec& next) {
  std::vector<Diagnostic> diags;
  for (const auto& [path, field] : current.fields()) {
    const auto* n = next.find(path);
    if (!n) {
      diags.push_back({path, "field removed"});
    } else if (!field.same_contract(*n)) {
      diags.push_back({path, "field definition changed"});
    }
  }
  for (const auto& [path, field] : next.fields()) {
    if (current.find(path)) continue;
    auto table = path.substr(0, path.find('.'));
    if (current.has_table(table) && field.required) {
      diags.push_back({path, "new field on existing table must be optional"});
    }
  }
  return diags;
}

// ---------------------------------------------------------------------------

namespace {

void check_value(const FieldSpec& fs, const std::string& key, const Value& v,
                 std::vector<Violation>& out) {
  if (v.type() != fs.type) {
    out.push_back({key, fmt::format("type mismatch: expected {}, got {}",
                                    value_type_name(fs.type), value_type_name(v.type()))});
    return;
  }
  const auto& c = fs.constraints;
  auto check_range = [&](double x) {
    if (c.minimum && x < *c.minimum) {
      out.push_back({key, fmt::format("value {} below minimum {}", x, *c.minimum)});
    }
    if (c.maximum && x > *c.maximum) {
      out.push_back({key, fmt::format("value {} above maximum {}", x, *c.maximum)});
    }
  };
  auto check_length = [&](std::size_t n) {
    if (c.min_length && n < *c.min_length) {
      out.push_back({key, fmt::format("length {} below minLength {}", n, *c.min_length)});
    }
    if (c.max_length && n > *c.max_length) {
      out.push_back({key, fmt::format("length {} above maxLength {}", n, *c.max_length)});
    }
  };
  switch (fs.type) {
    case ValueType::integer:
      check_range(static_cast<double>(v.as_integer()));
      break;
    case ValueType::decimal:
      if (!std::isfinite(v.as_decimal())) {
        out.push_back({key, "decimal must be finite"});
      } else {
        check_range(v.as_decimal());
      }
      break;
    case ValueType::string:
      check_length(v.as_string().size());
      if (fs.compiled_pattern && !std::regex_search(v.as_string(), *fs.compiled_pattern)) {
        out.push_back({key, fmt::format("value does not match pattern '{}'", *c.pattern)});
      }
      break;
    case ValueType::bytes:
      check_length(v.as_bytes().size());
      break;
    case ValueType::reference:
      if (!valid_identifier(v.as_reference())) {
        out.push_back({key, "reference must name a row id"});
      }
      break;
    case ValueType::boolean:
      break;
  }
}

}  // namespace

std::vector<Violation> validate_payload(const CompiledChainSpec& spec,
                                        const ledger::Transaction& tx, const RowLookup& rows) {
  std::vector<Violation> out;
  if (tx.writes.empty()) out.push_back({tx.tx_id, "transaction has no writes"});
  if (tx.latency_bound_ms && *tx.latency_bound_ms == 0) {
    out.push_back({tx.tx_id, "latency bound must be positive"});
  }

  std::set<std::string> written;
  std::map<std::string, std::set<std::string>> fields_by_row;  // row prefix -> fields
  for (const auto& w : tx.writes) {
    const auto key = w.key.state_key();
    if (!valid_identifier(w.key.table) || !valid_identifier(w.key.row) ||
        !valid_identifier(w.key.field)) {
      out.push_back({key, "malformed field key"});
      continue;
    }
    const auto* fs = spec.find(w.key.path());
    if (!fs) {
      out.push_back({key, fmt::format("unknown field '{}'", w.key.path())});
      continue;
    }
    if (!written.insert(key).second) {
      out.push_back({key, "field written twice in one transaction"});
      continue;
    }
    fields_by_row[w.key.row_prefix()].insert(w.key.field);
    check_value(*fs, key, w.value, out);
  }

  for (const auto& r : tx.reads) {
    auto k = FieldKey::parse_state_key(r.key);
    if (!k || !spec.find(k->path())) {
      out.push_back({r.key, "read of unknown field"});
    }
  }

  if (rows) {
    for (const auto& [prefix, fields] : fields_by_row) {
      if (rows(prefix)) continue;
      const auto table = prefix.substr(0, prefix.find('/'));
      for (const auto& name : spec.table_fields(table)) {
        const auto* fs = spec.find(table + "." + name);
        if (fs && fs->required && !fields.contains(name)) {
          out.push_back({prefix + name,
                         fmt::format("new row is missing required field '{}.{}'", table, name)});
        }
      }
    }
  }
  return out;
}

}  // namespace sledger::schema
