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

// Offline audit of a ledger: hash-chain and certificate verification,
// sequential replay of world state at any height, code agreement checks and
// the export file format (u32 length-prefixed block encodings).

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sledger/crypto.hpp"
#include "sledger/ledger_model.hpp"
#include "sledger/substrate.hpp"

namespace sledger::integrity {

struct ChainReport {
  bool ok = true;
  std::optional<std::uint64_t> first_invalid;
  std::string reason;
};

ChainReport chain_verify(const ledger::ChainConfig& config, std::span<const ledger::Block> chain);

struct AgreementReport {
  bool ok = false;
  std::size_t valid_yes = 0;
  std::size_t threshold = 0;
  std::vector<std::string> deficiencies;
};

// Needs nothing but the block and the membership keys.
AgreementReport verify_agreement(const ledger::ChainConfig& config, const ledger::Block& block,
                                 ledger::PolicyMode policy);

struct StateSnapshot {
  std::uint64_t height = 0;
  substrate::KVStore store;
  Digest digest;
};

// Replays committed entries of blocks 0..height one by one on a fresh store,
// ignoring schedules. Throws Errc::chain_verification_failure when the chain
// is invalid at or below `height`, Errc::out_of_range past the head.
StateSnapshot audit_state_at(const ledger::ChainConfig& config,
                             std::span<const ledger::Block> chain, std::uint64_t height);

struct CodeMismatch {
  std::uint64_t height = 0;
  std::string entry_id;
  std::string artifact;
  std::string problem;
};

struct CodeAudit {
  std::size_t checked = 0;
  std::vector<CodeMismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
};

// Re-hashes the stored bytes of every agreed artifact; the store's own
// digest field is not trusted.
CodeAudit verify_code_agreements(std::span<const ledger::Block> chain,
                                 const substrate::BlobSource& blobs);

struct MetadataProblem {
  std::uint64_t height = 0;
  std::string entry_id;
  std::string problem;
};

// Re-checks ACL updates and schema evolutions against the state the ledger
// itself implies at their height.
std::vector<MetadataProblem> audit_metadata(std::span<const ledger::Block> chain);

// ---------------------------------------------------------------------------

Bytes export_ledger(std::span<const ledger::Block> chain);

struct ImportResult {
  std::vector<ledger::Block> blocks;
  // Index of the first record that failed to decode.
  std::optional<std::uint64_t> failed_at;
  std::string error;
};

ImportResult import_ledger(ByteView bytes);

struct AuditReport {
  std::vector<std::string> lines;  // height|check|result
  bool ok = true;
  std::optional<std::uint64_t> first_invalid;
  std::optional<Digest> head_digest;

  std::string text() const;
};

// Full standalone audit of an export file.
AuditReport audit_export(const ledger::ChainConfig& config, ByteView export_bytes);

}  // namespace sledger::integrity
