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

#include "sledger/access_control.hpp"

#include <fmt/format.h>

#include "sledger/error.hpp"
#include "sledger/world_state.hpp"

namespace sledger::acl {
namespace {

const PrincipalSet kNobody{};

std::string wildcard_of(std::string_view path) {
  return std::string(path.substr(0, path.find('.'))) + ".*";
}

}  // namespace

const PrincipalSet& AclState::effective(std::string_view path, AclMode mode) const {
  const auto* field = spec_ ? spec_->find(path) : nullptr;
  if (!field) {
    throw Error(Errc::not_found, fmt::format("unknown field path '{}'", path));
  }
  if (auto it = overrides_.find({std::string(path), mode}); it != overrides_.end()) {
    return it->second;
  }
  if (auto it = overrides_.find({wildcard_of(path), mode}); it != overrides_.end()) {
    return it->second;
  }
  return mode == AclMode::read ? field->readers : field->writers;
}

Decision AclState::check_access(std::string_view principal, std::string_view path,
                                AclMode mode) const {
  return effective(path, mode).allows(principal) ? Decision::allow : Decision::deny;
}

bool AclState::may_update(std::string_view principal, std::string_view path) const {
  auto dot = path.find('.');
  if (dot == std::string_view::npos || !spec_) return false;
  if (path.substr(dot + 1) == "*") {
    auto table = path.substr(0, dot);
    const auto& fields = spec_->table_fields(table);
    if (fields.empty()) return false;
    for (const auto& f : fields) {
      if (!allows(principal, fmt::format("{}.{}", table, f), AclMode::write)) return false;
    }
    return true;
  }
  if (!spec_->find(path)) return false;
  return allows(principal, path, AclMode::write);
}

std::vector<std::string> AclState::check_update(const ledger::AclUpdate& update) const {
  std::vector<std::string> problems;
  auto dot = update.path.find('.');
  bool resolves = false;
  if (dot != std::string::npos && spec_) {
    auto field = update.path.substr(dot + 1);
    resolves = field == "*" ? spec_->has_table(update.path.substr(0, dot))
                            : spec_->find(update.path) != nullptr;
  }
  if (!resolves) {
    problems.push_back(fmt::format("{}: ACL path does not resolve", update.path));
    return problems;
  }
  if (!update.is_public && update.principals.empty()) {
    problems.push_back(fmt::format("{}: empty principal set without public marker", update.path));
  }
  if (!may_update(update.submitter, update.path)) {
    problems.push_back(fmt::format("{}: {} is not a current writer", update.path, update.submitter));
  }
  return problems;
}

void AclState::apply(const ledger::AclUpdate& update, std::uint64_t height) {
  PrincipalSet set;
  set.is_public = update.is_public;
  set.principals.insert(update.principals.begin(), update.principals.end());
  overrides_[{update.path, update.mode}] = set;
  history_.push_back(
      LineageRecord{height, update.path, update.mode, set, update.update_id, update.submitter});
}

std::vector<LineageRecord> AclState::lineage(std::string_view path) const {
  std::vector<LineageRecord> out;
  for (const auto& r : history_) {
    if (r.path == path) out.push_back(r);
  }
  return out;
}

bool AclState::operator==(const AclState& other) const {
  const bool same_schema = (spec_ && other.spec_) ? spec_->digest() == other.spec_->digest()
                                                  : spec_ == other.spec_;
  return same_schema && overrides_ == other.overrides_ && history_ == other.history_;
}

AclState materialize(std::span<const ledger::Block> chain,
                     std::optional<std::uint64_t> through_height) {
  AclState state;
  for (const auto& block : chain) {
    if (through_height && block.height > *through_height) break;
    if (block.status != ledger::BlockStatus::committed) continue;
    for (const auto& entry : block.entries) {
      if (const auto* evo = std::get_if<ledger::SchemaEvolution>(&entry.body)) {
        state.set_schema(std::make_shared<const schema::CompiledChainSpec>(
            schema::compile_schema_json(evo->schema_json)));
      } else if (const auto* upd = std::get_if<ledger::AclUpdate>(&entry.body)) {
        state.apply(*upd, block.height);
      }
    }
  }
  return state;
}

std::map<std::string, Value> scoped_read(const substrate::KVStore& store,
                                         std::string_view prefix, const AclState& acl,
                                         std::string_view principal, const ReadScope& scope) {
  std::map<std::string, Value> out;
  auto consider = [&](std::string_view key, const substrate::VersionedValue& vv) {
    if (state::is_system_key(key)) return;
    auto fk = FieldKey::parse_state_key(key);
    if (!fk || !acl.spec().find(fk->path())) return;
    if (!acl.allows(principal, fk->path(), AclMode::read)) return;
    out.emplace(std::string(key), Value::from_encoded(vv.value));
  };
  if (const auto* keys = std::get_if<std::vector<std::string>>(&scope)) {
    for (const auto& key : *keys) {
      if (const auto* vv = store.get(std::string(prefix) + key)) consider(key, *vv);
    }
  } else {
    const auto& scan = std::get<TableScan>(scope);
    const auto full = std::string(prefix) + scan.table + "/";
    for (const auto& [key, vv] : store.scan_prefix(full)) {
      consider(key.substr(prefix.size()), *vv);
    }
  }
  return out;
}

std::string lineage_report(const AclState& acl, std::string_view path) {
  std::string out;
  for (const auto& r : acl.history()) {
    if (!path.empty() && r.path != path) continue;
    out += fmt::format("{}|{}|{}|{}\n", r.height, r.path, ledger::acl_mode_name(r.mode),
                       r.principals.display());
  }
  return out;
}

}  // namespace sledger::acl
