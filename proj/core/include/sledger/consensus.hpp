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

// Protocol rules shared by nodes, the orchestrator and offline audits:
// quorum thresholds, conflict partitioning, leader rotation, certificate
// checks and structural block verification.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sledger/crypto.hpp"
#include "sledger/error.hpp"
#include "sledger/ledger_model.hpp"

namespace sledger::consensus {

using ledger::PolicyMode;

std::size_t threshold(PolicyMode mode, std::size_t n);

struct VotePolicy {
  PolicyMode mode = PolicyMode::majority;
  std::size_t n = 1;

  std::size_t threshold() const { return consensus::threshold(mode, n); }
  bool met(std::size_t yes_votes) const { return yes_votes >= threshold(); }
};

// Connected components of the conflict graph, each in queue order, lanes
// ordered by their first entry. Two entries conflict when one writes a key
// the other reads or writes, or when they share an ordered atomic group.
std::vector<ledger::Lane> partition_conflicts(std::span<const ledger::LedgerEntry> entries);

// Every index in [0, count) appears exactly once and lanes are increasing.
bool schedule_well_formed(const std::vector<ledger::Lane>& schedule, std::size_t count);

std::string rotate_leader(const ledger::ChainConfig& config, std::uint64_t height);

struct CertificateCheck {
  std::size_t valid_yes = 0;
  std::size_t threshold = 0;
  bool binds = true;  // certificate names this block's id and hash
  std::vector<std::string> deficiencies;

  bool met() const { return binds && valid_yes >= threshold; }
};

// Offline check of the certificate carried by `block`: every vote must come
// from a distinct configured node and verify over (block_id, content_hash).
CertificateCheck check_certificate(const ledger::ChainConfig& config, const ledger::Block& block,
                                   PolicyMode policy);

// Reason the block cannot follow (expected_height, expected_prev), or
// nullopt. Covers linkage, content hash, schedule, entry signatures and the
// certificate/status pairing.
std::optional<std::string> block_defect(const ledger::ChainConfig& config,
                                        const ledger::Block& block,
                                        std::uint64_t expected_height,
                                        const Digest& expected_prev);

class ChainVerificationError : public Error {
 public:
  ChainVerificationError(std::uint64_t height, const std::string& reason);
  std::uint64_t height() const noexcept { return height_; }

 private:
  std::uint64_t height_;
};

// ---------------------------------------------------------------------------
// Wire messages.

struct BlockProposal {
  ledger::Block block;
  Digest orchestration_digest;
};

inline constexpr std::uint32_t kBlockLevel = 0xffffffffu;

struct Offense {
  std::uint32_t index = kBlockLevel;  // entry index, or kBlockLevel
  std::string entry_id;
  std::string reason;

  bool operator==(const Offense&) const = default;
};

struct VerifyReply {
  ledger::Vote vote;
  std::vector<Offense> offenses;
};

Bytes encode_proposal(const BlockProposal& proposal);
BlockProposal decode_proposal(ByteView bytes);
Bytes encode_reply(const VerifyReply& reply);
VerifyReply decode_reply(ByteView bytes);

}  // namespace sledger::consensus
