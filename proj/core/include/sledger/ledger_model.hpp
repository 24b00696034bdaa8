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

// Chain data types and their canonical encodings: transactions, metadata
// entries, blocks, vote certificates and chain configuration.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sledger/crypto.hpp"
#include "sledger/encoding.hpp"
#include "sledger/value.hpp"

namespace sledger::ledger {

enum class GroupMode : std::uint8_t { none = 0, unordered = 1, ordered = 2 };

// Atomic group membership. Members of one group commit in the same block or
// not at all; ordered groups additionally apply in index order.
struct AtomicGroup {
  std::string id;
  GroupMode mode = GroupMode::none;
  std::uint32_t size = 0;
  std::uint32_t index = 0;

  bool grouped() const { return mode != GroupMode::none; }
  bool operator==(const AtomicGroup&) const = default;
};

struct WriteOp {
  FieldKey key;
  Value value;
  bool operator==(const WriteOp&) const = default;
};

// Declared read: the state key and the version the submitter observed
// (0 = key absent).
struct ReadDecl {
  std::string key;
  std::uint64_t version = 0;
  bool operator==(const ReadDecl&) const = default;
};

struct Transaction {
  std::string tx_id;
  std::string submitter;
  Digest schema_digest;  // schema the payload was built against
  std::vector<WriteOp> writes;
  std::vector<ReadDecl> reads;
  AtomicGroup group;
  std::optional<std::uint32_t> latency_bound_ms;
  Signature signature;
  Digest content_digest;

  bool operator==(const Transaction&) const = default;
};

enum class AclMode : std::uint8_t { read = 1, write = 2 };
std::string_view acl_mode_name(AclMode mode);

struct AclUpdate {
  std::string update_id;
  std::string submitter;
  std::string path;  // "table.field" or "table.*"
  AclMode mode = AclMode::write;
  bool is_public = false;
  std::vector<std::string> principals;  // sorted, unique
  Signature signature;

  bool operator==(const AclUpdate&) const = default;
};

struct SchemaEvolution {
  std::string evolution_id;
  std::string submitter;
  std::string schema_json;  // normalised schema document
  Digest schema_digest;
  Signature signature;

  bool operator==(const SchemaEvolution&) const = default;
};

struct CodeArtifact {
  std::string name;
  std::uint32_t version = 1;
  Digest digest;

  bool operator==(const CodeArtifact&) const = default;
};

// Agreement on code stored embargoed in every node's blob store under
// FunctionRegistry::code_key(name, version).
struct CodeAgreement {
  std::string agreement_id;
  std::string submitter;
  std::vector<CodeArtifact> artifacts;
  Signature signature;

  bool operator==(const CodeAgreement&) const = default;
};

struct SoftwareUpdate {
  std::string update_id;
  std::string submitter;
  CodeArtifact artifact;
  Signature signature;

  bool operator==(const SoftwareUpdate&) const = default;
};

enum class EntryKind : std::uint8_t {
  transaction = 1,
  acl_update = 2,
  schema_evolution = 3,
  code_agreement = 4,
  software_update = 5,
};
std::string_view entry_kind_name(EntryKind kind);

// Submitter name used for the unsigned entries of the genesis block.
inline constexpr std::string_view kGenesisSubmitter = "genesis";

struct LedgerEntry {
  using Body = std::variant<Transaction, AclUpdate, SchemaEvolution, CodeAgreement,
                            SoftwareUpdate>;
  Body body;

  EntryKind kind() const { return static_cast<EntryKind>(body.index() + 1); }
  const std::string& id() const;
  const std::string& submitter() const;
  const Signature& signature() const;

  const Transaction* transaction() const { return std::get_if<Transaction>(&body); }

  bool operator==(const LedgerEntry&) const = default;
};

// Bytes covered by the submitter's signature (everything except the
// signature and, for transactions, the content digest).
Bytes signing_bytes(const LedgerEntry& entry);
Bytes signing_bytes(const Transaction& tx);

// Fills in content_digest and signature.
void sign_transaction(Transaction& tx, const KeyPair& keys);
void sign_entry(LedgerEntry& entry, const KeyPair& keys);
bool verify_entry(const LedgerEntry& entry, const PublicKey& key);

// ---------------------------------------------------------------------------

enum class BlockStatus : std::uint8_t { pending = 0, committed = 1, aborted = 2 };
std::string_view block_status_name(BlockStatus status);

using Lane = std::vector<std::uint32_t>;

struct Vote {
  std::string node;
  bool yes = false;
  Signature signature;
  bool operator==(const Vote&) const = default;
};

struct VoteCertificate {
  std::string block_id;
  Digest block_hash;
  std::vector<Vote> votes;
  bool operator==(const VoteCertificate&) const = default;
};

// Bytes a node signs when voting.
Bytes vote_message(std::string_view block_id, const Digest& block_hash, bool yes);
Vote make_vote(std::string node, std::string_view block_id, const Digest& block_hash,
               bool yes, const KeyPair& keys);

struct Block {
  std::uint64_t height = 0;
  std::string block_id;
  std::vector<LedgerEntry> entries;
  Digest prev_hash;
  std::vector<Lane> schedule;
  Digest content_hash;
  VoteCertificate certificate;
  BlockStatus status = BlockStatus::pending;

  // Canonical encoding of the hashed part: height, id, entries, prev_hash
  // and schedule. Votes, status and the stored hash are excluded.
  Bytes content_bytes() const;
  Digest compute_content_hash() const;
  void seal() { content_hash = compute_content_hash(); }

  bool operator==(const Block&) const = default;
};

// ---------------------------------------------------------------------------

void encode(ByteWriter& w, const Transaction& tx);
void encode(ByteWriter& w, const LedgerEntry& entry);
void encode(ByteWriter& w, const VoteCertificate& cert);
void encode(ByteWriter& w, const Block& block);

Transaction decode_transaction(ByteReader& r);
LedgerEntry decode_entry(ByteReader& r);
VoteCertificate decode_certificate(ByteReader& r);
Block decode_block(ByteReader& r);

Bytes encode_entry(const LedgerEntry& entry);
LedgerEntry decode_entry(ByteView bytes);
Bytes encode_block(const Block& block);
Block decode_block(ByteView bytes);

// `entity hex` line used by the golden encoding files.
std::string golden_line(std::string_view entity, ByteView bytes);

// ---------------------------------------------------------------------------

enum class PolicyMode : std::uint8_t { all = 1, majority = 2, bft_majority = 3 };
std::string_view policy_name(PolicyMode mode);
std::optional<PolicyMode> parse_policy(std::string_view name);

enum class LeaderMode : std::uint8_t { rotating = 1, dedicated = 2 };

struct Member {
  std::string id;
  PublicKey key;
  bool operator==(const Member&) const = default;
};

struct ChainConfig {
  std::vector<Member> nodes;
  std::vector<Member> clients;  // non-node principals allowed to submit
  PolicyMode policy = PolicyMode::majority;
  std::uint32_t max_block_size = 900;
  LeaderMode leader_mode = LeaderMode::rotating;
  std::string dedicated_leader;  // node id, dedicated mode only
  std::uint32_t default_latency_bound_ms = 1000;

  // Throws Errc::invalid_config.
  void validate() const;

  const PublicKey* principal_key(std::string_view principal) const;
  std::optional<std::size_t> node_index(std::string_view node) const;
  bool is_node(std::string_view id) const { return node_index(id).has_value(); }

  bool operator==(const ChainConfig&) const = default;
};

std::string chain_config_to_json(const ChainConfig& config);
ChainConfig chain_config_from_json(std::string_view json);

struct GenesisSpec {
  std::string schema_json;
  Digest schema_digest;
  std::vector<CodeArtifact> consensus_code;
};

// Height-0 block: [schema_evolution, code_agreement], zero prev_hash,
// committed, signed yes by every founding node.
Block make_genesis(const ChainConfig& config, const GenesisSpec& spec,
                   const KeyRing& node_keys);

}  // namespace sledger::ledger
