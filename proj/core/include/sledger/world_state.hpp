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

// How ledger entries touch the world state: the keys they read and write
// (used for conflict partitioning) and the concrete writes they perform
// when applied. Also the order-independent state digest.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sledger/crypto.hpp"
#include "sledger/ledger_model.hpp"
#include "sledger/substrate.hpp"

namespace sledger::state {

// System keys live alongside user keys ("table/row/field"); identifiers
// cannot start with '$', so the namespaces never collide.
inline constexpr std::string_view kSchemaKey = "$schema";
std::string code_key(std::string_view artifact_name);
std::string acl_key(std::string_view path, ledger::AclMode mode);
bool is_system_key(std::string_view key);

// Keys an entry reads and writes, used for conflict partitioning. Includes
// the ACL and schema keys its validity depends on, plus one pseudo-key per
// table for ACL updates.
struct Footprint {
  std::vector<std::string> reads;
  std::vector<std::string> writes;
};

Footprint entry_footprint(const ledger::LedgerEntry& entry);

struct StateWrite {
  std::string key;
  Bytes value;
};

std::vector<StateWrite> entry_effects(const ledger::LedgerEntry& entry);

Bytes encode_principal_set(bool is_public, const std::vector<std::string>& principals);
Bytes encode_code_value(const ledger::CodeArtifact& artifact);

// Digest over (key, value, version) triples in key order. Keys are taken
// relative to `prefix`, so a node's prefixed store and a bare oracle store
// holding the same data agree.
Digest state_digest(const substrate::KVStore& store, std::string_view prefix = {});

}  // namespace sledger::state
