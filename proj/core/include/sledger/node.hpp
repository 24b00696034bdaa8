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

// A consensus participant: verify and apply handlers over its own account's
// world state, ledger and pending-block store.

#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sledger/access_control.hpp"
#include "sledger/consensus.hpp"
#include "sledger/crypto.hpp"
#include "sledger/ledger_model.hpp"
#include "sledger/schema.hpp"
#include "sledger/substrate.hpp"

namespace sledger::consensus {

enum class NodeStatus { active, crashed, lagging };
std::string_view node_status_name(NodeStatus status);

// World-state keys live under this prefix in the node's KV store, next to
// "ledger/<height>" and "pending/<block_id>".
inline constexpr std::string_view kStatePrefix = "ws:";

// Writes a block's state effects lane by lane. Lane effects are computed on
// up to `threads` workers and committed in lane order.
void apply_block_state(substrate::KVStore& store, std::string_view prefix,
                       const ledger::Block& block, std::size_t threads = 1);

struct NodeOptions {
  std::size_t apply_threads = 1;
};

class Node {
 public:
  Node(std::string id, KeyPair keys, std::shared_ptr<const ledger::ChainConfig> config,
       NodeOptions options = {});

  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  const std::string& id() const { return account_.id; }
  substrate::NodeAccount& account() { return account_; }
  const substrate::NodeAccount& account() const { return account_; }
  const ledger::ChainConfig& config() const { return *config_; }

  // Applies the genesis block; must be called once before anything else.
  void bootstrap(const ledger::Block& genesis);

  std::uint64_t height() const { return chain_.back().height; }
  const Digest& head_hash() const { return chain_.back().content_hash; }
  std::span<const ledger::Block> chain() const { return chain_; }

  // Step 3. Throws Errc::stale_head if the proposal does not extend this
  // node's head.
  VerifyReply verify(const BlockProposal& proposal);
  // Step 4. Throws Errc::invalid_certificate (refused) or Errc::stale_head
  // (no matching pending block).
  void apply(const ledger::Block& certified);
  void record_aborted(const ledger::Block& aborted);
  // Fetches blocks above the local head from `source`, verifies all of them,
  // then replays them. Returns the number of blocks taken. Throws
  // ChainVerificationError naming the first bad height; nothing is applied
  // in that case.
  std::size_t resync(std::span<const ledger::Block> source);

  bool holds_pending(std::string_view block_id) const;
  bool has_committed(std::string_view tx_id) const { return committed_txs_.contains(tx_id); }

  Digest state_digest() const;
  const acl::AclState& acl() const { return acl_; }
  const schema::CompiledChainSpec& schema() const { return *spec_; }
  std::shared_ptr<const schema::CompiledChainSpec> schema_ptr() const { return spec_; }
  const ledger::CodeArtifact* agreed_code(std::string_view name) const;

  std::map<std::string, Value> scoped_read(std::string_view principal,
                                           const acl::ReadScope& scope) const;

  bool lagging() const { return lagging_; }
  void set_lagging(bool lagging) { lagging_ = lagging; }

 private:
  void commit(ledger::Block block);
  void append(ledger::Block block);
  std::vector<Offense> validate_entries(const ledger::Block& block) const;

  substrate::NodeAccount account_;
  KeyPair keys_;
  std::shared_ptr<const ledger::ChainConfig> config_;
  NodeOptions options_;

  std::vector<ledger::Block> chain_;
  std::map<std::string, ledger::Block, std::less<>> pending_;
  std::set<std::string, std::less<>> committed_txs_;
  std::shared_ptr<const schema::CompiledChainSpec> spec_;
  acl::AclState acl_;
  std::map<std::string, ledger::CodeArtifact, std::less<>> code_;
  bool lagging_ = false;
};

}  // namespace sledger::consensus
