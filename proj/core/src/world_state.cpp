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

#include "sledger/world_state.hpp"

#include <fmt/format.h>

namespace sledger::state {

std::string code_key(std::string_view artifact_name) {
  return fmt::format("$code/{}", artifact_name);
}

std::string acl_key(std::string_view path, ledger::AclMode mode) {
  return fmt::format("$acl/{}/{}", path, mode == ledger::AclMode::read ? "r" : "w");
}

bool is_system_key(std::string_view key) { return !key.empty() && key.front() == '$'; }

Footprint entry_footprint(const ledger::LedgerEntry& entry) {
  using namespace ledger;
  Footprint fp;
  std::visit(
      [&fp](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Transaction>) {
          fp.writes.reserve(b.writes.size());
          fp.reads.emplace_back(kSchemaKey);
          for (const auto& w : b.writes) {
            fp.writes.push_back(w.key.state_key());
            // Write authorisation depends on the field's and the table's ACL.
            fp.reads.push_back(acl_key(w.key.path(), AclMode::write));
            fp.reads.push_back(acl_key(w.key.table + ".*", AclMode::write));
          }
          for (const auto& r : b.reads) fp.reads.push_back(r.key);
        } else if constexpr (std::is_same_v<T, AclUpdate>) {
          fp.reads.emplace_back(kSchemaKey);
          fp.writes.push_back(acl_key(b.path, b.mode));
          // Wildcard authorisation reads every field ACL of the table, so all
          // updates on one table share a lane.
          fp.writes.push_back(fmt::format("$acl-table/{}", b.path.substr(0, b.path.find('.'))));
        } else if constexpr (std::is_same_v<T, SchemaEvolution>) {
          fp.writes.emplace_back(kSchemaKey);
        } else if constexpr (std::is_same_v<T, CodeAgreement>) {
          for (const auto& a : b.artifacts) fp.writes.push_back(code_key(a.name));
        } else {
          fp.writes.push_back(code_key(b.artifact.name));
        }
      },
      entry.body);
  return fp;
}

Bytes encode_principal_set(bool is_public, const std::vector<std::string>& principals) {
  ByteWriter w;
  w.boolean(is_public).u32(static_cast<std::uint32_t>(principals.size()));
  for (const auto& p : principals) w.str(p);
  return w.take();
}

Bytes encode_code_value(const ledger::CodeArtifact& artifact) {
  ByteWriter w;
  w.u32(artifact.version).fixed(artifact.digest.bytes);
  return w.take();
}

std::vector<StateWrite> entry_effects(const ledger::LedgerEntry& entry) {
  using namespace ledger;
  std::vector<StateWrite> out;
  std::visit(
      [&out](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Transaction>) {
          out.reserve(b.writes.size());
          for (const auto& w : b.writes) {
            out.push_back(StateWrite{w.key.state_key(), w.value.encoded()});
          }
        } else if constexpr (std::is_same_v<T, AclUpdate>) {
          out.push_back(StateWrite{acl_key(b.path, b.mode),
                                   encode_principal_set(b.is_public, b.principals)});
        } else if constexpr (std::is_same_v<T, SchemaEvolution>) {
          out.push_back(StateWrite{std::string(kSchemaKey),
                                   Bytes(b.schema_digest.bytes.begin(), b.schema_digest.bytes.end())});
        } else if constexpr (std::is_same_v<T, CodeAgreement>) {
          for (const auto& a : b.artifacts) {
            out.push_back(StateWrite{code_key(a.name), encode_code_value(a)});
          }
        } else {
          out.push_back(StateWrite{code_key(b.artifact.name), encode_code_value(b.artifact)});
        }
      },
      entry.body);
  return out;
}

Digest state_digest(const substrate::KVStore& store, std::string_view prefix) {
  Hasher h;
  ByteWriter w;
  w.str("sledger.state.v1");
  for (const auto& [key, vv] : store.scan_prefix(prefix)) {
    w.str(key.substr(prefix.size())).bytes(vv->value).u64(vv->version);
    if (w.view().size() > 64 * 1024) {
      h.update(w.view());
      w = ByteWriter();
    }
  }
  h.update(w.view());
  return h.finish();
}

}  // namespace sledger::state
