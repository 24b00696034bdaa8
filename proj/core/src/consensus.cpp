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

#include "sledger/consensus.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "sledger/world_state.hpp"

namespace sledger::consensus {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    // Smaller index becomes the root so roots identify lanes by first entry.
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::size_t threshold(PolicyMode mode, std::size_t n) {
  switch (mode) {
    case PolicyMode::all: return n;
    case PolicyMode::majority: return n / 2 + 1;
    case PolicyMode::bft_majority: return 2 * n / 3 + 1;
  }
  throw Error(Errc::invalid_argument, "unknown vote policy");
}

std::vector<ledger::Lane> partition_conflicts(std::span<const ledger::LedgerEntry> entries) {
  const auto n = entries.size();
  DisjointSets sets(n);
  struct KeyUse {
    std::ptrdiff_t writer = -1;
    std::vector<std::size_t> readers;
  };
  std::unordered_map<std::string, KeyUse> uses;
  std::unordered_map<std::string, std::size_t> ordered_groups;

  for (std::size_t i = 0; i < n; ++i) {
    auto fp = state::entry_footprint(entries[i]);
    for (auto& key : fp.writes) {
      auto& use = uses[std::move(key)];
      if (use.writer < 0) {
        use.writer = static_cast<std::ptrdiff_t>(i);
      } else {
        sets.unite(i, static_cast<std::size_t>(use.writer));
      }
    }
    for (auto& key : fp.reads) uses[std::move(key)].readers.push_back(i);
    if (const auto* tx = entries[i].transaction();
        tx && tx->group.mode == ledger::GroupMode::ordered) {
      auto [it, fresh] = ordered_groups.emplace(tx->group.id, i);
      if (!fresh) sets.unite(i, it->second);
    }
  }
  for (const auto& [key, use] : uses) {
    if (use.writer < 0) continue;
    for (auto r : use.readers) sets.unite(r, static_cast<std::size_t>(use.writer));
  }

  std::vector<ledger::Lane> lanes;
  std::vector<std::size_t> lane_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = sets.find(i);
    if (root == i) {
      lane_of[i] = lanes.size();
      lanes.emplace_back();
    }
    lanes[lane_of[root]].push_back(static_cast<std::uint32_t>(i));
  }
  return lanes;
}

bool schedule_well_formed(const std::vector<ledger::Lane>& schedule, std::size_t count) {
  std::vector<bool> seen(count, false);
  std::size_t total = 0;
  for (const auto& lane : schedule) {
    if (lane.empty()) return false;
    for (std::size_t k = 0; k < lane.size(); ++k) {
      const auto idx = lane[k];
      if (idx >= count || seen[idx]) return false;
      if (k > 0 && lane[k - 1] >= idx) return false;
      seen[idx] = true;
      ++total;
    }
  }
  return total == count;
}

std::string rotate_leader(const ledger::ChainConfig& config, std::uint64_t height) {
  if (config.leader_mode == ledger::LeaderMode::dedicated) return config.dedicated_leader;
  if (config.nodes.empty()) throw Error(Errc::invalid_config, "no nodes configured");
  return config.nodes[height % config.nodes.size()].id;
}

CertificateCheck check_certificate(const ledger::ChainConfig& config, const ledger::Block& block,
                                   PolicyMode policy) {
  CertificateCheck out;
  out.threshold = threshold(policy, config.nodes.size());
  const auto& cert = block.certificate;
  if (cert.block_id != block.block_id) {
    out.binds = false;
    out.deficiencies.push_back(
        fmt::format("certificate names block '{}', not '{}'", cert.block_id, block.block_id));
  }
  if (cert.block_hash != block.content_hash) {
    out.binds = false;
    out.deficiencies.push_back(fmt::format("certificate names hash {}, not {}",
                                           cert.block_hash.short_hex(),
                                           block.content_hash.short_hex()));
  }
  std::set<std::string, std::less<>> seen;
  for (const auto& vote : cert.votes) {
    const auto* key = config.is_node(vote.node) ? config.principal_key(vote.node) : nullptr;
    if (!key) {
      out.deficiencies.push_back(fmt::format("{}: not a configured node", vote.node));
      continue;
    }
    if (!seen.insert(vote.node).second) {
      out.deficiencies.push_back(fmt::format("{}: duplicate vote", vote.node));
      continue;
    }
    if (!verify_signature(*key, ledger::vote_message(block.block_id, block.content_hash, vote.yes),
                          vote.signature)) {
      out.deficiencies.push_back(fmt::format("{}: invalid signature", vote.node));
      continue;
    }
    if (vote.yes) ++out.valid_yes;
  }
  return out;
}

std::optional<std::string> block_defect(const ledger::ChainConfig& config,
                                        const ledger::Block& block,
                                        std::uint64_t expected_height,
                                        const Digest& expected_prev) {
  using ledger::BlockStatus;
  if (block.height != expected_height) {
    return fmt::format("height {} where {} was expected", block.height, expected_height);
  }
  if (block.prev_hash != expected_prev) return "prev_hash does not link to the previous block";
  if (block.block_id.empty()) return "empty block id";
  if (block.compute_content_hash() != block.content_hash) return "content hash mismatch";
  if (!schedule_well_formed(block.schedule, block.entries.size())) return "malformed schedule";
  if (block.schedule != partition_conflicts(block.entries)) {
    return "schedule differs from the conflict partition";
  }
  for (std::size_t i = 0; i < block.entries.size(); ++i) {
    const auto& entry = block.entries[i];
    if (entry.submitter() == ledger::kGenesisSubmitter) {
      const bool genesis_kind = entry.kind() == ledger::EntryKind::schema_evolution ||
                                entry.kind() == ledger::EntryKind::code_agreement;
      if (block.height != 0 || !genesis_kind) {
        return fmt::format("entry {}: genesis entry outside the genesis block", i);
      }
      continue;
    }
    const auto* key = config.principal_key(entry.submitter());
    if (!key) return fmt::format("entry {}: unknown submitter '{}'", i, entry.submitter());
    if (!ledger::verify_entry(entry, *key)) return fmt::format("entry {}: bad signature", i);
  }
  if (block.status == BlockStatus::pending) return "block is still pending";
  auto cert = check_certificate(config, block, config.policy);
  if (!cert.deficiencies.empty()) return "certificate: " + cert.deficiencies.front();
  if (block.status == BlockStatus::committed && !cert.met()) {
    return fmt::format("certificate: {} valid yes votes, threshold {}", cert.valid_yes,
                       cert.threshold);
  }
  if (block.status == BlockStatus::aborted && cert.met()) {
    return "aborted block carries a quorum certificate";
  }
  return std::nullopt;
}

ChainVerificationError::ChainVerificationError(std::uint64_t height, const std::string& reason)
    : Error(Errc::chain_verification_failure, fmt::format("height {}: {}", height, reason)),
      height_(height) {}

// ---------------------------------------------------------------------------

Bytes encode_proposal(const BlockProposal& proposal) {
  ByteWriter w;
  ledger::encode(w, proposal.block);
  w.fixed(proposal.orchestration_digest.bytes);
  return w.take();
}

BlockProposal decode_proposal(ByteView bytes) {
  ByteReader r(bytes);
  BlockProposal p;
  p.block = ledger::decode_block(r);
  p.orchestration_digest.bytes = r.fixed<32>();
  r.expect_end();
  return p;
}

Bytes encode_reply(const VerifyReply& reply) {
  ByteWriter w;
  w.str(reply.vote.node).boolean(reply.vote.yes).fixed(reply.vote.signature.bytes);
  w.u32(static_cast<std::uint32_t>(reply.offenses.size()));
  for (const auto& o : reply.offenses) w.u32(o.index).str(o.entry_id).str(o.reason);
  return w.take();
}

VerifyReply decode_reply(ByteView bytes) {
  ByteReader r(bytes);
  VerifyReply reply;
  reply.vote.node = r.str();
  reply.vote.yes = r.boolean();
  reply.vote.signature.bytes = r.fixed<64>();
  const auto count = r.count(12);
  reply.offenses.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Offense o;
    o.index = r.u32();
    o.entry_id = r.str();
    o.reason = r.str();
    reply.offenses.push_back(std::move(o));
  }
  r.expect_end();
  return reply;
}

}  // namespace sledger::consensus
