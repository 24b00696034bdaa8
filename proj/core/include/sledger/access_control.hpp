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

// Per-field ACLs. Effective permissions are the schema defaults overlaid
// with committed acl_update entries; an exact "table.field" entry beats a
// "table.*" wildcard, and a field nobody was granted is denied.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sledger/ledger_model.hpp"
#include "sledger/schema.hpp"
#include "sledger/substrate.hpp"
#include "sledger/value.hpp"

namespace sledger::acl {

using ledger::AclMode;
using schema::PrincipalSet;

enum class Decision { allow, deny };

struct LineageRecord {
  std::uint64_t height = 0;
  std::string path;
  AclMode mode = AclMode::write;
  PrincipalSet principals;
  std::string update_id;
  std::string submitter;

  bool operator==(const LineageRecord&) const = default;
};

class AclState {
 public:
  AclState() = default;
  explicit AclState(std::shared_ptr<const schema::CompiledChainSpec> spec)
      : spec_(std::move(spec)) {}

  // Schema evolution: keeps overrides, picks up defaults of new fields.
  void set_schema(std::shared_ptr<const schema::CompiledChainSpec> spec) {
    spec_ = std::move(spec);
  }
  const schema::CompiledChainSpec& spec() const { return *spec_; }

  // Throws Errc::not_found for a path the schema does not define.
  Decision check_access(std::string_view principal, std::string_view path,
                        AclMode mode) const;
  bool allows(std::string_view principal, std::string_view path, AclMode mode) const {
    return check_access(principal, path, mode) == Decision::allow;
  }
  const PrincipalSet& effective(std::string_view path, AclMode mode) const;

  // ACL-of-ACL: only current writers of a path may change its ACL. For a
  // wildcard the submitter must be able to write every field of the table.
  bool may_update(std::string_view principal, std::string_view path) const;

  // Empty when the update is acceptable against the current state.
  std::vector<std::string> check_update(const ledger::AclUpdate& update) const;
  void apply(const ledger::AclUpdate& update, std::uint64_t height);

  const std::vector<LineageRecord>& history() const { return history_; }
  std::vector<LineageRecord> lineage(std::string_view path) const;

  bool operator==(const AclState& other) const;

 private:
  std::shared_ptr<const schema::CompiledChainSpec> spec_;
  std::map<std::pair<std::string, AclMode>, PrincipalSet> overrides_;
  std::vector<LineageRecord> history_;
};

// Rebuilds ACL state from committed ledger entries up to and including
// `through_height` (all blocks when nullopt).
AclState materialize(std::span<const ledger::Block> chain,
                     std::optional<std::uint64_t> through_height = std::nullopt);

struct TableScan {
  std::string table;
};
using ReadScope = std::variant<std::vector<std::string>, TableScan>;

// Returns the readable subset of the requested user fields keyed by state
// key. Denied fields are omitted, not blanked.
std::map<std::string, Value> scoped_read(const substrate::KVStore& store,
                                         std::string_view prefix, const AclState& acl,
                                         std::string_view principal, const ReadScope& scope);

// `height|path|mode|principals` per record; all paths when path is empty.
std::string lineage_report(const AclState& acl, std::string_view path = {});

}  // namespace sledger::acl
