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

// A provisioned network: node accounts, the gateway queue and the
// orchestrator driving two-phase-commit rounds on the simulated clock.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sledger/consensus.hpp"
#include "sledger/costmodel.hpp"
#include "sledger/crypto.hpp"
#include "sledger/ledger_model.hpp"
#include "sledger/node.hpp"
#include "sledger/schema.hpp"
#include "sledger/substrate.hpp"

namespace sledger::consensus {

using substrate::SimDuration;
using substrate::SimTime;

struct LatencyConfig {
  substrate::LatencyRange invoke{substrate::millis(8), substrate::millis(10)};
  substrate::LatencyRange link{substrate::millis(1), substrate::millis(2)};
  SimDuration vote_timeout = substrate::millis(100);
  SimDuration visibility_timeout = substrate::seconds(1);
  // Subtracted from a transaction's latency bound when deciding when to
  // close a batch.
  SimDuration expected_commit = substrate::millis(40);
  SimDuration group_timeout = substrate::seconds(5);

  void validate() const;
};

struct NetworkOptions {
  std::uint64_t seed = 1;
  substrate::FaultPlan faults;
  LatencyConfig latency;
  NodeOptions node_options;
  bool trace = true;
};

struct Membership {
  ledger::ChainConfig config;
  KeyRing keys;
};

// Derives a key pair per principal from the seed and lists them in a
// config with default protocol settings.
Membership make_membership(std::span<const std::string> nodes,
                           std::span<const std::string> clients, std::uint64_t seed);

enum class EntryStatus { in_flight, committed, aborted, rejected };
std::string_view entry_status_name(EntryStatus status);

struct EntryRecord {
  std::string id;
  SimTime submitted_at = 0;
  std::optional<SimTime> enqueued_at;
  SimTime finished_at = 0;
  EntryStatus status = EntryStatus::in_flight;
  std::uint64_t height = 0;
  std::string reason;
};

struct IngestReceipt {
  std::uint64_t receipt = 0;
  SimTime enqueued_at = 0;
};

enum class RoundResult { empty, stalled, committed, aborted, forged, vetoed };
std::string_view round_result_name(RoundResult result);

struct RoundOutcome {
  RoundResult result = RoundResult::empty;
  std::uint64_t height = 0;
  std::string block_id;
  std::string leader;
  std::size_t entries = 0;
  std::size_t yes_votes = 0;
  std::size_t excluded = 0;
  SimTime started_at = 0;
  SimTime committed_at = 0;
  SimTime finished_at = 0;
  std::vector<std::string> lagging;
};

// Orchestrator behaviour for one round when the fault plan marks it
// nefarious. `none` is the honest protocol.
enum class Attack { none, forged_votes, replayed_votes, inflated_votes, content_swap, bad_digest };
std::string_view attack_name(Attack attack);

struct NetworkStats {
  std::uint64_t rounds = 0;
  std::uint64_t blocks_committed = 0;
  std::uint64_t blocks_aborted = 0;
  std::uint64_t remints = 0;
  std::uint64_t attacks = 0;
  std::uint64_t detections = 0;
  std::uint64_t leader_fallbacks = 0;
  std::uint64_t resyncs = 0;
  std::uint64_t messages_lost = 0;
  std::uint64_t messages_corrupted = 0;
  std::vector<std::uint32_t> batch_sizes;
};

class Network {
 public:
  Network(const schema::CompiledChainSpec& spec, ledger::ChainConfig config, KeyRing keys,
          NetworkOptions options);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  substrate::SimClock& clock() { return clock_; }
  substrate::EventTrace& trace() { return trace_; }
  const substrate::SimClock& clock() const { return clock_; }
  const substrate::EventTrace& trace() const { return trace_; }
  const substrate::FaultPlan& faults() const { return options_.faults; }
  const LatencyConfig& latency() const { return options_.latency; }
  const ledger::ChainConfig& config() const { return *config_; }
  const KeyRing& keys() const { return keys_; }
  const ledger::Block& genesis() const { return genesis_; }

  std::size_t node_count() const { return nodes_.size(); }
  Node& node(std::size_t i) { return *nodes_.at(i); }
  const Node& node(std::size_t i) const { return *nodes_.at(i); }
  Node* find_node(std::string_view id);
  NodeStatus status(std::size_t i) const;
  // The most advanced non-lagging node; its view is the chain head.
  const Node& reference_node() const;

  const substrate::DurableQueue& queue() const { return queue_; }
  const cost::BillingMeter& meter() const { return meter_; }
  const NetworkStats& stats() const { return stats_; }
  const std::map<std::string, EntryRecord>& entries() const { return records_; }
  const std::set<std::string>& forged_block_ids() const { return forged_ids_; }
  Digest orchestrator_digest() const;

  // Step 1 at clock().now(): client link, signature and payload checks,
  // durable enqueue. Throws Errc::message_lost, Errc::bad_signature,
  // Errc::unknown_principal or Errc::invalid_argument (duplicate id); the
  // entry is recorded as rejected in each case.
  IngestReceipt ingest(const ledger::LedgerEntry& entry);
  // Raw payload path; throws Errc::decode_error for unparsable bytes.
  IngestReceipt ingest_payload(ByteView payload);

  // Event-driven operation: the entry is built and ingested at `at`, and
  // the orchestrator mints whenever a batch is due. Building at submission
  // time lets clients declare reads against the state they see then.
  using EntryFactory = std::function<ledger::LedgerEntry()>;
  void submit_at(SimTime at, EntryFactory make);
  void submit_at(SimTime at, ledger::LedgerEntry entry) {
    submit_at(at, [e = std::move(entry)] { return e; });
  }
  // Runs events until `limit`, or earlier once nothing is in flight and no
  // submissions remain. Returns true when drained.
  bool run(SimTime limit);
  // Advances to `t` (processing events) and resyncs every live lagging node.
  void settle(SimTime t);

  // Steps 2-4 once, at clock().now(), minting whatever is selectable.
  RoundOutcome run_round();
  // Resyncs every live lagging node from the reference node.
  void resync_lagging();

  // Forces the attack used by the next nefarious round (tests).
  void force_attack(Attack attack) { forced_attack_ = attack; }

 private:
  struct Selection {
    std::vector<std::uint64_t> receipts;
    std::optional<SimTime> deadline;
    std::optional<SimTime> group_expiry;  // earliest incomplete-group timeout
  };
  struct Reply {
    std::size_t node = 0;
    SimTime at = 0;
    VerifyReply reply;
  };
  struct VerifyRound {
    std::vector<Reply> replies;  // in arrival order
    std::vector<bool> delivered; // node received the proposal
    SimTime decided_at = 0;
    std::size_t yes = 0;
    bool met = false;
  };
  struct ApplyRound {
    std::size_t applied = 0;
    std::vector<SimTime> done;
    SimTime finished_at = 0;
  };

  const ledger::LedgerEntry& cached_entry(const substrate::QueueMessage& msg);
  void forget(std::uint64_t receipt);
  Selection select(SimTime now);
  std::optional<std::size_t> choose_leader(SimTime now, std::uint64_t height);
  bool transmit(Bytes& sealed);
  ledger::Block build_block(std::uint64_t height, const Digest& prev,
                            std::vector<ledger::LedgerEntry> entries, std::string id) const;
  VerifyRound verify_phase(const BlockProposal& proposal, SimTime at);
  ApplyRound apply_phase(const ledger::Block& certified, const std::vector<bool>& targets,
                         SimTime at, bool forged);
  void abort_phase(const ledger::Block& aborted, SimTime at);
  RoundOutcome attack_round(Attack attack, RoundOutcome out, ledger::Block block,
                            std::size_t leader, SimTime at);
  ledger::LedgerEntry forged_entry();
  void finish(std::uint64_t receipt, EntryStatus status, SimTime at, std::uint64_t height,
              std::string reason);
  void mark_lagging(std::size_t node, SimTime at, std::string_view why);
  std::size_t state_writes(const ledger::Block& block) const;
  void poke();
  void schedule_wake(SimTime at);

  NetworkOptions options_;
  std::shared_ptr<const ledger::ChainConfig> config_;
  KeyRing keys_;
  substrate::SimClock clock_;
  substrate::EventTrace trace_;
  substrate::FaultInjector injector_;
  ledger::Block genesis_;
  std::vector<std::unique_ptr<Node>> nodes_;
  substrate::DurableQueue queue_;

  std::map<std::uint64_t, ledger::LedgerEntry> decoded_;
  std::size_t grouped_pending_ = 0;  // grouped entries among decoded_
  std::map<std::uint64_t, std::string> receipt_ids_;
  std::map<std::string, EntryRecord> records_;
  std::set<std::string> forged_ids_;
  std::optional<std::size_t> excluded_leader_;
  std::optional<Attack> forced_attack_;
  std::uint64_t round_seq_ = 0;
  std::uint64_t forged_seq_ = 0;

  cost::BillingMeter meter_;
  NetworkStats stats_;

  bool busy_ = false;
  std::size_t pending_submissions_ = 0;
  std::set<SimTime> wakes_;
};

// Builds and provisions a network: per-node accounts with embargoed code,
// registered functions and the genesis block installed everywhere.
std::unique_ptr<Network> provision_network(const schema::CompiledChainSpec& spec,
                                           ledger::ChainConfig config, KeyRing keys,
                                           NetworkOptions options = {});

}  // namespace sledger::consensus
