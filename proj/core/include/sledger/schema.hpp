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

// Data-model compiler: turns a schema document (a small JSON-Schema-like
// vocabulary of tables, typed fields, constraints and default ACLs) into a
// flat field registry with a content digest, and validates transaction
// payloads against it.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sledger/crypto.hpp"
#include "sledger/error.hpp"
#include "sledger/ledger_model.hpp"
#include "sledger/value.hpp"

namespace sledger::schema {

struct PrincipalSet {
  bool is_public = false;
  std::set<std::string> principals;

  static PrincipalSet everyone() { return PrincipalSet{true, {}}; }
  bool allows(std::string_view principal) const {
    return is_public || principals.contains(std::string(principal));
  }
  bool empty() const { return !is_public && principals.empty(); }
  std::vector<std::string> sorted() const { return {principals.begin(), principals.end()}; }
  std::string display() const;

  bool operator==(const PrincipalSet&) const = default;
};

struct Constraints {
  std::optional<double> minimum;
  std::optional<double> maximum;
  std::optional<std::uint32_t> min_length;
  std::optional<std::uint32_t> max_length;
  std::optional<std::string> pattern;
  std::string reference_table;  // reference fields only

  bool operator==(const Constraints&) const = default;
};

struct FieldDef {
  std::string name;
  std::string type;  // resolved (and rejected if unsupported) by compile_schema
  bool required = false;
  Constraints constraints;
};

struct TableDef {
  std::string name;
  std::vector<FieldDef> fields;
};

struct DefaultAcl {
  std::optional<PrincipalSet> read;
  std::optional<PrincipalSet> write;
};

struct SchemaDoc {
  std::vector<TableDef> tables;
  std::map<std::string, DefaultAcl> default_acl;  // "table.field" or "table.*"

  // Throws SchemaError. Duplicate names are kept so compile() can report
  // them.
  static SchemaDoc parse(std::string_view json_text);
  // Normalised JSON (sorted object keys, two-space indent).
  std::string to_json() const;
};

struct Diagnostic {
  std::string path;
  std::string message;
  std::string str() const { return path + ": " + message; }
};

class SchemaError : public Error {
 public:
  explicit SchemaError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct FieldSpec {
  ValueType type = ValueType::string;
  bool required = false;
  Constraints constraints;
  PrincipalSet readers;  // schema defaults, wildcard already resolved
  PrincipalSet writers;
  std::shared_ptr<const std::regex> compiled_pattern;

  bool same_contract(const FieldSpec& other) const {
    return type == other.type && required == other.required &&
           constraints == other.constraints && readers == other.readers &&
           writers == other.writers;
  }
};

class CompiledChainSpec {
 public:
  const std::map<std::string, FieldSpec>& fields() const { return fields_; }
  const FieldSpec* find(std::string_view path) const;
  bool has_table(std::string_view table) const { return tables_.contains(std::string(table)); }
  // Field names of a table in declaration order.
  const std::vector<std::string>& table_fields(std::string_view table) const;
  std::vector<std::string> tables() const;

  const Digest& digest() const { return digest_; }
  const std::string& schema_json() const { return schema_json_; }

  Bytes canonical_registry() const;

 private:
  friend CompiledChainSpec compile_schema(const SchemaDoc& doc);

  std::map<std::string, FieldSpec> fields_;
  std::map<std::string, std::vector<std::string>> tables_;
  Digest digest_;
  std::string schema_json_;
};

// Throws SchemaError carrying one diagnostic per problem.
CompiledChainSpec compile_schema(const SchemaDoc& doc);
CompiledChainSpec compile_schema_json(std::string_view json_text);

// Additive-evolution check: every existing field keeps its contract, new
// fields on existing tables are optional.
std::vector<Diagnostic> check_additive(const CompiledChainSpec& current,
                                       const CompiledChainSpec& next);

struct Violation {
  std::string path;
  std::string message;
  std::string str() const { return path + ": " + message; }
};

// Answers "does a row with this state-key prefix already exist?".
using RowLookup = std::function<bool(const std::string& row_prefix)>;

// Checks every write for field existence, type and constraints, and every
// read for a resolvable key. When `rows` is supplied, writes that create a
// row must also carry all required fields of its table.
std::vector<Violation> validate_payload(const CompiledChainSpec& spec,
                                        const ledger::Transaction& tx,
                                        const RowLookup& rows = {});

}  // namespace sledger::schema
