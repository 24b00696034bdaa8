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

#include "sledger/ledger_model.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "json.hpp"
#include "sledger/error.hpp"

namespace sledger::ledger {
namespace {

constexpr std::string_view kTxDomain = "sledger.tx.v1";
constexpr std::string_view kEntryDomain = "sledger.entry.v1";
constexpr std::string_view kBlockDomain = "sledger.block.v1";
constexpr std::string_view kVoteDomain = "sledger.vote.v1";

void encode_tx_body(ByteWriter& w, const Transaction& tx) {
  w.str(tx.tx_id).str(tx.submitter).fixed(tx.schema_digest.bytes);
  w.u32(static_cast<std::uint32_t>(tx.writes.size()));
  for (const auto& op : tx.writes) {
    w.str(op.key.table).str(op.key.row).str(op.key.field);
    op.value.encode(w);
  }
  w.u32(static_cast<std::uint32_t>(tx.reads.size()));
  for (const auto& rd : tx.reads) {
    w.str(rd.key).u64(rd.version);
  }
  w.str(tx.group.id).u8(static_cast<std::uint8_t>(tx.group.mode));
  w.u32(tx.group.size).u32(tx.group.index);
  w.boolean(tx.latency_bound_ms.has_value());
  if (tx.latency_bound_ms) w.u32(*tx.latency_bound_ms);
}

Transaction decode_tx_body(ByteReader& r) {
  Transaction tx;
  tx.tx_id = r.str();
  tx.submitter = r.str();
  tx.schema_digest.bytes = r.fixed<32>();
  auto nw = r.count(17);
  tx.writes.reserve(nw);
  for (std::uint32_t i = 0; i < nw; ++i) {
    WriteOp op;
    op.key.table = r.str();
    op.key.row = r.str();
    op.key.field = r.str();
    op.value = Value::decode(r);
    tx.writes.push_back(std::move(op));
  }
  auto nr = r.count(12);
  tx.reads.reserve(nr);
  for (std::uint32_t i = 0; i < nr; ++i) {
    ReadDecl rd;
    rd.key = r.str();
    rd.version = r.u64();
    tx.reads.push_back(std::move(rd));
  }
  tx.group.id = r.str();
  auto mode = r.u8();
  if (mode > 2) throw Error(Errc::decode_error, "invalid group mode");
  tx.group.mode = static_cast<GroupMode>(mode);
  tx.group.size = r.u32();
  tx.group.index = r.u32();
  if (tx.group.mode == GroupMode::none) {
    if (!tx.group.id.empty() || tx.group.size != 0 || tx.group.index != 0) {
      throw Error(Errc::decode_error, "non-canonical empty group");
    }
  } else if (tx.group.id.empty() || tx.group.index >= tx.group.size) {
    throw Error(Errc::decode_error, "invalid group membership");
  }
  if (r.boolean()) tx.latency_bound_ms = r.u32();
  return tx;
}

void encode_artifact(ByteWriter& w, const CodeArtifact& a) {
  w.str(a.name).u32(a.version).fixed(a.digest.bytes);
}

CodeArtifact decode_artifact(ByteReader& r) {
  CodeArtifact a;
  a.name = r.str();
  a.version = r.u32();
  a.digest.bytes = r.fixed<32>();
  return a;
}

// Body of a non-transaction entry, excluding its signature.
void encode_meta_body(ByteWriter& w, const LedgerEntry::Body& body) {
  if (const auto* u = std::get_if<AclUpdate>(&body)) {
    w.str(u->update_id).str(u->submitter).str(u->path);
    w.u8(static_cast<std::uint8_t>(u->mode)).boolean(u->is_public);
    w.u32(static_cast<std::uint32_t>(u->principals.size()));
    for (const auto& p : u->principals) w.str(p);
  } else if (const auto* s = std::get_if<SchemaEvolution>(&body)) {
    w.str(s->evolution_id).str(s->submitter).str(s->schema_json).fixed(s->schema_digest.bytes);
  } else if (const auto* c = std::get_if<CodeAgreement>(&body)) {
    w.str(c->agreement_id).str(c->submitter);
    w.u32(static_cast<std::uint32_t>(c->artifacts.size()));
    for (const auto& a : c->artifacts) encode_artifact(w, a);
  } else if (const auto* su = std::get_if<SoftwareUpdate>(&body)) {
    w.str(su->update_id).str(su->submitter);
    encode_artifact(w, su->artifact);
  }
}

void encode_block_content(ByteWriter& w, const Block& b) {
  w.u64(b.height).str(b.block_id).fixed(b.prev_hash.bytes);
  w.u32(static_cast<std::uint32_t>(b.entries.size()));
  for (const auto& e : b.entries) encode(w, e);
  w.u32(static_cast<std::uint32_t>(b.schedule.size()));
  for (const auto& lane : b.schedule) {
    w.u32(static_cast<std::uint32_t>(lane.size()));
    for (auto idx : lane) w.u32(idx);
  }
}

}  // namespace

std::string_view acl_mode_name(AclMode mode) {
  return mode == AclMode::read ? "read" : "write";
}

std::string_view entry_kind_name(EntryKind kind) {
  switch (kind) {
    case EntryKind::transaction: return "transaction";
    case EntryKind::acl_update: return "acl_update";
    case EntryKind::schema_evolution: return "schema_evolution";
    case EntryKind::code_agreement: return "code_agreement";
    case EntryKind::software_update: return "software_update";
  }
  return "unknown";
}

std::string_view block_status_name(BlockStatus status) {
  switch (status) {
    case BlockStatus::pending: return "pending";
    case BlockStatus::committed: return "committed";
    case BlockStatus::aborted: return "aborted";
  }
  return "unknown";
}

const std::string& LedgerEntry::id() const {
  return std::visit(
      [](const auto& b) -> const std::string& {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Transaction>) return b.tx_id;
        else if constexpr (std::is_same_v<T, AclUpdate>) return b.update_id;
        else if constexpr (std::is_same_v<T, SchemaEvolution>) return b.evolution_id;
        else if constexpr (std::is_same_v<T, CodeAgreement>) return b.agreement_id;
        else return b.update_id;
      },
      body);
}

const std::string& LedgerEntry::submitter() const {
  return std::visit([](const auto& b) -> const std::string& { return b.submitter; }, body);
}

const Signature& LedgerEntry::signature() const {
  return std::visit([](const auto& b) -> const Signature& { return b.signature; }, body);
}

Bytes signing_bytes(const Transaction& tx) {
  ByteWriter w;
  w.str(kTxDomain);
  encode_tx_body(w, tx);
  return w.take();
}

Bytes signing_bytes(const LedgerEntry& entry) {
  if (const auto* tx = entry.transaction()) return signing_bytes(*tx);
  ByteWriter w;
  w.str(kEntryDomain).u8(static_cast<std::uint8_t>(entry.kind()));
  encode_meta_body(w, entry.body);
  return w.take();
}

void sign_transaction(Transaction& tx, const KeyPair& keys) {
  auto msg = signing_bytes(tx);
  tx.content_digest = hash_content(msg);
  tx.signature = keys.sign(msg);
}

void sign_entry(LedgerEntry& entry, const KeyPair& keys) {
  if (auto* tx = std::get_if<Transaction>(&entry.body)) {
    sign_transaction(*tx, keys);
    return;
  }
  auto msg = signing_bytes(entry);
  auto sig = keys.sign(msg);
  std::visit([&sig](auto& b) { b.signature = sig; }, entry.body);
}

bool verify_entry(const LedgerEntry& entry, const PublicKey& key) {
  auto msg = signing_bytes(entry);
  if (const auto* tx = entry.transaction()) {
    if (hash_content(msg) != tx->content_digest) return false;
  }
  return verify_signature(key, msg, entry.signature());
}

// ---------------------------------------------------------------------------

void encode(ByteWriter& w, const Transaction& tx) {
  encode_tx_body(w, tx);
  w.fixed(tx.signature.bytes).fixed(tx.content_digest.bytes);
}

Transaction decode_transaction(ByteReader& r) {
  auto tx = decode_tx_body(r);
  tx.signature.bytes = r.fixed<64>();
  tx.content_digest.bytes = r.fixed<32>();
  return tx;
}

void encode(ByteWriter& w, const LedgerEntry& entry) {
  w.u8(static_cast<std::uint8_t>(entry.kind()));
  if (const auto* tx = entry.transaction()) {
    encode(w, *tx);
    return;
  }
  encode_meta_body(w, entry.body);
  w.fixed(entry.signature().bytes);
}

LedgerEntry decode_entry(ByteReader& r) {
  LedgerEntry e;
  switch (static_cast<EntryKind>(r.u8())) {
    case EntryKind::transaction:
      e.body = decode_transaction(r);
      return e;
    case EntryKind::acl_update: {
      AclUpdate u;
      u.update_id = r.str();
      u.submitter = r.str();
      u.path = r.str();
      auto mode = r.u8();
      if (mode != 1 && mode != 2) throw Error(Errc::decode_error, "invalid acl mode");
      u.mode = static_cast<AclMode>(mode);
      u.is_public = r.boolean();
      auto n = r.count(4);
      for (std::uint32_t i = 0; i < n; ++i) {
        u.principals.push_back(r.str());
        if (i > 0 && !(u.principals[i - 1] < u.principals[i])) {
          throw Error(Errc::decode_error, "acl principals not sorted/unique");
        }
      }
      u.signature.bytes = r.fixed<64>();
      e.body = std::move(u);
      return e;
    }
    case EntryKind::schema_evolution: {
      SchemaEvolution s;
      s.evolution_id = r.str();
      s.submitter = r.str();
      s.schema_json = r.str();
      s.schema_digest.bytes = r.fixed<32>();
      s.signature.bytes = r.fixed<64>();
      e.body = std::move(s);
      return e;
    }
    case EntryKind::code_agreement: {
      CodeAgreement c;
      c.agreement_id = r.str();
      c.submitter = r.str();
      auto n = r.count(40);
      for (std::uint32_t i = 0; i < n; ++i) c.artifacts.push_back(decode_artifact(r));
      c.signature.bytes = r.fixed<64>();
      e.body = std::move(c);
      return e;
    }
    case EntryKind::software_update: {
      SoftwareUpdate su;
      su.update_id = r.str();
      su.submitter = r.str();
      su.artifact = decode_artifact(r);
      su.signature.bytes = r.fixed<64>();
      e.body = std::move(su);
      return e;
    }
  }
  throw Error(Errc::decode_error, "unknown entry kind");
}

Bytes vote_message(std::string_view block_id, const Digest& block_hash, bool yes) {
  ByteWriter w;
  w.str(kVoteDomain).str(block_id).fixed(block_hash.bytes).boolean(yes);
  return w.take();
}

Vote make_vote(std::string node, std::string_view block_id, const Digest& block_hash,
               bool yes, const KeyPair& keys) {
  Vote v;
  v.node = std::move(node);
  v.yes = yes;
  v.signature = keys.sign(vote_message(block_id, block_hash, yes));
  return v;
}

void encode(ByteWriter& w, const VoteCertificate& cert) {
  w.str(cert.block_id).fixed(cert.block_hash.bytes);
  w.u32(static_cast<std::uint32_t>(cert.votes.size()));
  for (const auto& v : cert.votes) {
    w.str(v.node).boolean(v.yes).fixed(v.signature.bytes);
  }
}

VoteCertificate decode_certificate(ByteReader& r) {
  VoteCertificate c;
  c.block_id = r.str();
  c.block_hash.bytes = r.fixed<32>();
  auto n = r.count(69);
  c.votes.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Vote v;
    v.node = r.str();
    v.yes = r.boolean();
    v.signature.bytes = r.fixed<64>();
    c.votes.push_back(std::move(v));
  }
  return c;
}

Bytes Block::content_bytes() const {
  ByteWriter w;
  w.str(kBlockDomain);
  encode_block_content(w, *this);
  return w.take();
}

Digest Block::compute_content_hash() const { return hash_content(content_bytes()); }

void encode(ByteWriter& w, const Block& b) {
  encode_block_content(w, b);
  w.fixed(b.content_hash.bytes).u8(static_cast<std::uint8_t>(b.status));
  encode(w, b.certificate);
}

Block decode_block(ByteReader& r) {
  Block b;
  b.height = r.u64();
  b.block_id = r.str();
  b.prev_hash.bytes = r.fixed<32>();
  auto n = r.count(1);
  b.entries.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) b.entries.push_back(decode_entry(r));
  auto lanes = r.count(4);
  b.schedule.reserve(lanes);
  for (std::uint32_t i = 0; i < lanes; ++i) {
    auto len = r.count(4);
    Lane lane(len);
    for (auto& idx : lane) idx = r.u32();
    b.schedule.push_back(std::move(lane));
  }
  b.content_hash.bytes = r.fixed<32>();
  auto status = r.u8();
  if (status > 2) throw Error(Errc::decode_error, "invalid block status");
  b.status = static_cast<BlockStatus>(status);
  b.certificate = decode_certificate(r);
  return b;
}

Bytes encode_entry(const LedgerEntry& entry) {
  ByteWriter w;
  encode(w, entry);
  return w.take();
}

LedgerEntry decode_entry(ByteView bytes) {
  ByteReader r(bytes);
  auto e = decode_entry(r);
  r.expect_end();
  return e;
}

Bytes encode_block(const Block& block) {
  ByteWriter w;
  encode(w, block);
  return w.take();
}

Block decode_block(ByteView bytes) {
  ByteReader r(bytes);
  auto b = decode_block(r);
  r.expect_end();
  return b;
}

std::string golden_line(std::string_view entity, ByteView bytes) {
  return fmt::format("{} {}", entity, to_hex(bytes));
}

// ---------------------------------------------------------------------------

std::string_view policy_name(PolicyMode mode) {
  switch (mode) {
    case PolicyMode::all: return "all";
    case PolicyMode::majority: return "majority";
    case PolicyMode::bft_majority: return "bft_majority";
  }
  return "unknown";
}

std::optional<PolicyMode> parse_policy(std::string_view name) {
  for (auto m : {PolicyMode::all, PolicyMode::majority, PolicyMode::bft_majority}) {
    if (policy_name(m) == name) return m;
  }
  return std::nullopt;
}

void ChainConfig::validate() const {
  if (nodes.empty()) throw Error(Errc::invalid_config, "chain needs at least one node");
  if (max_block_size < 1) throw Error(Errc::invalid_config, "max_block_size must be >= 1");
  std::set<std::string_view> seen;
  for (const auto* group : {&nodes, &clients}) {
    for (const auto& m : *group) {
      if (!valid_identifier(m.id)) {
        throw Error(Errc::invalid_config, fmt::format("invalid principal id '{}'", m.id));
      }
      if (m.id == kGenesisSubmitter) {
        throw Error(Errc::invalid_config, "principal id 'genesis' is reserved");
      }
      if (!seen.insert(m.id).second) {
        throw Error(Errc::invalid_config, fmt::format("duplicate principal id '{}'", m.id));
      }
    }
  }
  if (leader_mode == LeaderMode::dedicated && !is_node(dedicated_leader)) {
    throw Error(Errc::invalid_config,
                fmt::format("dedicated leader '{}' is not a node", dedicated_leader));
  }
}

const PublicKey* ChainConfig::principal_key(std::string_view principal) const {
  for (const auto* group : {&nodes, &clients}) {
    for (const auto& m : *group) {
      if (m.id == principal) return &m.key;
    }
  }
  return nullptr;
}

std::optional<std::size_t> ChainConfig::node_index(std::string_view node) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == node) return i;
  }
  return std::nullopt;
}

std::string chain_config_to_json(const ChainConfig& config) {
  using nlohmann::json;
  auto members = [](const std::vector<Member>& ms) {
    json arr = json::array();
    for (const auto& m : ms) arr.push_back({{"id", m.id}, {"public_key", m.key.hex()}});
    return arr;
  };
  json j;
  j["nodes"] = members(config.nodes);
  j["clients"] = members(config.clients);
  j["policy"] = policy_name(config.policy);
  j["max_block_size"] = config.max_block_size;
  j["leader_mode"] = config.leader_mode == LeaderMode::rotating ? "rotating" : "dedicated";
  j["dedicated_leader"] = config.dedicated_leader;
  j["default_latency_bound_ms"] = config.default_latency_bound_ms;
  return j.dump(2) + "\n";
}

ChainConfig chain_config_from_json(std::string_view text) {
  using nlohmann::json;
  ChainConfig c;
  try {
    auto j = json::parse(text);
    auto members = [](const json& arr) {
      std::vector<Member> out;
      for (const auto& m : arr) {
        out.push_back(Member{m.at("id").get<std::string>(),
                             PublicKey::from_hex(m.at("public_key").get<std::string>())});
      }
      return out;
    };
    c.nodes = members(j.at("nodes"));
    if (j.contains("clients")) c.clients = members(j.at("clients"));
    auto policy = parse_policy(j.value("policy", std::string("majority")));
    if (!policy) throw Error(Errc::invalid_config, "unknown policy");
    c.policy = *policy;
    c.max_block_size = j.value("max_block_size", 900u);
    auto mode = j.value("leader_mode", std::string("rotating"));
    if (mode != "rotating" && mode != "dedicated") {
      throw Error(Errc::invalid_config, "leader_mode must be rotating or dedicated");
    }
    c.leader_mode = mode == "rotating" ? LeaderMode::rotating : LeaderMode::dedicated;
    c.dedicated_leader = j.value("dedicated_leader", std::string());
    c.default_latency_bound_ms = j.value("default_latency_bound_ms", 1000u);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, fmt::format("chain config: {}", e.what()));
  }
  c.validate();
  return c;
}

Block make_genesis(const ChainConfig& config, const GenesisSpec& spec,
                   const KeyRing& node_keys) {
  config.validate();
  Block g;
  g.height = 0;
  g.block_id = "genesis";
  g.prev_hash = Digest::zero();

  SchemaEvolution schema;
  schema.evolution_id = "genesis-schema";
  schema.submitter = std::string(kGenesisSubmitter);
  schema.schema_json = spec.schema_json;
  schema.schema_digest = spec.schema_digest;
  g.entries.push_back(LedgerEntry{std::move(schema)});

  CodeAgreement code;
  code.agreement_id = "genesis-code";
  code.submitter = std::string(kGenesisSubmitter);
  code.artifacts = spec.consensus_code;
  g.entries.push_back(LedgerEntry{std::move(code)});

  // The two entries write disjoint system keys.
  g.schedule = {{0}, {1}};
  g.seal();

  g.certificate.block_id = g.block_id;
  g.certificate.block_hash = g.content_hash;
  for (const auto& node : config.nodes) {
    g.certificate.votes.push_back(
        make_vote(node.id, g.block_id, g.content_hash, true, node_keys.keys(node.id)));
  }
  g.status = BlockStatus::committed;
  return g;
}

}  // namespace sledger::ledger
