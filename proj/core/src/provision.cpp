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

// Network provisioning, the gateway (step 1) and the event loop.

#include <fmt/format.h>

#include "sledger/error.hpp"
#include "sledger/network.hpp"

namespace sledger::consensus {
namespace {

constexpr std::string_view kOrchestratorCode =
    "sledger orchestrator v1: mint, fan out verify, certify, fan out apply";
constexpr std::string_view kNodeCode =
    "sledger node v1: verify(proposal) -> vote; apply(block, certificate) -> ack";

enum class NodeOp : std::uint8_t { verify = 1, apply = 2, abort = 3 };

substrate::Handler node_handler(Node* node) {
  return [node](ByteView input) -> Bytes {
    if (input.empty()) throw Error(Errc::decode_error, "empty node request");
    const auto body = input.subspan(1);
    switch (static_cast<NodeOp>(input[0])) {
      case NodeOp::verify:
        return encode_reply(node->verify(decode_proposal(body)));
      case NodeOp::apply:
        node->apply(ledger::decode_block(body));
        return Bytes{1};
      case NodeOp::abort:
        node->record_aborted(ledger::decode_block(body));
        return Bytes{1};
    }
    throw Error(Errc::decode_error, "unknown node request");
  };
}

}  // namespace

void LatencyConfig::validate() const {
  for (const auto* r : {&invoke, &link}) {
    if (r->min < 0 || r->max < r->min) {
      throw Error(Errc::invalid_config, "latency range needs 0 <= min <= max");
    }
  }
  if (vote_timeout <= 0 || visibility_timeout <= 0 || group_timeout <= 0 ||
      expected_commit < 0) {
    throw Error(Errc::invalid_config, "timeouts must be positive");
  }
}

Membership make_membership(std::span<const std::string> nodes,
                           std::span<const std::string> clients, std::uint64_t seed) {
  Membership m;
  auto enrol = [&](const std::string& id, std::vector<ledger::Member>& into) {
    auto keys = KeyPair::derive(id, seed);
    into.push_back(ledger::Member{id, keys.public_key()});
    m.keys.add(id, std::move(keys));
  };
  for (const auto& id : nodes) enrol(id, m.config.nodes);
  for (const auto& id : clients) enrol(id, m.config.clients);
  return m;
}

std::string_view entry_status_name(EntryStatus status) {
  switch (status) {
    case EntryStatus::in_flight: return "in_flight";
    case EntryStatus::committed: return "committed";
    case EntryStatus::aborted: return "aborted";
    case EntryStatus::rejected: return "rejected";
  }
  return "unknown";
}

std::string_view round_result_name(RoundResult result) {
  switch (result) {
    case RoundResult::empty: return "empty";
    case RoundResult::stalled: return "stalled";
    case RoundResult::committed: return "committed";
    case RoundResult::aborted: return "aborted";
    case RoundResult::forged: return "forged";
    case RoundResult::vetoed: return "vetoed";
  }
  return "unknown";
}

std::string_view attack_name(Attack attack) {
  switch (attack) {
    case Attack::none: return "none";
    case Attack::forged_votes: return "forged_votes";
    case Attack::replayed_votes: return "replayed_votes";
    case Attack::inflated_votes: return "inflated_votes";
    case Attack::content_swap: return "content_swap";
    case Attack::bad_digest: return "bad_digest";
  }
  return "unknown";
}

Network::Network(const schema::CompiledChainSpec& spec, ledger::ChainConfig config,
                 KeyRing keys, NetworkOptions options)
    : options_(std::move(options)),
      config_(std::make_shared<const ledger::ChainConfig>(std::move(config))),
      keys_(std::move(keys)),
      clock_(options_.seed),
      trace_(options_.trace),
      injector_(options_.faults, clock_.rng()),
      queue_("gateway") {
  config_->validate();
  options_.faults.validate();
  options_.latency.validate();
  for (const auto& crash : options_.faults.node_crashes) {
    if (!config_->is_node(crash.node)) {
      throw Error(Errc::invalid_config, fmt::format("crash plan names unknown node '{}'", crash.node));
    }
  }

  ledger::GenesisSpec genesis;
  genesis.schema_json = spec.schema_json();
  genesis.schema_digest = spec.digest();
  genesis.consensus_code = {
      ledger::CodeArtifact{"orchestrator", 1, hash_content(to_bytes(kOrchestratorCode))},
      ledger::CodeArtifact{"node", 1, hash_content(to_bytes(kNodeCode))},
  };
  genesis_ = ledger::make_genesis(*config_, genesis, keys_);

  for (const auto& member : config_->nodes) {
    auto node = std::make_unique<Node>(member.id, keys_.keys(member.id), config_,
                                       options_.node_options);
    auto& account = node->account();
    account.functions.publish(account.blobs, "orchestrator", 1, to_bytes(kOrchestratorCode),
                              [](ByteView input) { return Bytes(input.begin(), input.end()); });
    account.functions.publish(account.blobs, "node", 1, to_bytes(kNodeCode),
                              node_handler(node.get()));
    node->bootstrap(genesis_);
    nodes_.push_back(std::move(node));
  }
  trace_.record(0, "network", "provision",
                fmt::format("nodes={} policy={} genesis={}", nodes_.size(),
                            ledger::policy_name(config_->policy), genesis_.content_hash.short_hex()));
}

std::unique_ptr<Network> provision_network(const schema::CompiledChainSpec& spec,
                                           ledger::ChainConfig config, KeyRing keys,
                                           NetworkOptions options) {
  return std::make_unique<Network>(spec, std::move(config), std::move(keys), std::move(options));
}

Node* Network::find_node(std::string_view id) {
  for (auto& n : nodes_) {
    if (n->id() == id) return n.get();
  }
  return nullptr;
}

NodeStatus Network::status(std::size_t i) const {
  const auto& n = node(i);
  if (options_.faults.is_crashed(n.id(), clock_.now())) return NodeStatus::crashed;
  return n.lagging() ? NodeStatus::lagging : NodeStatus::active;
}

const Node& Network::reference_node() const {
  // Lagging nodes are never ahead of in-sync ones, so the highest node is
  // authoritative; ties prefer a node not flagged as lagging.
  const Node* best = nullptr;
  for (const auto& n : nodes_) {
    if (!best || n->height() > best->height() ||
        (n->height() == best->height() && best->lagging() && !n->lagging())) {
      best = n.get();
    }
  }
  return *best;
}

Digest Network::orchestrator_digest() const {
  const auto* artifact = reference_node().agreed_code("orchestrator");
  return artifact ? artifact->digest : Digest::zero();
}

bool Network::transmit(Bytes& sealed) {
  switch (injector_.transmit(sealed)) {
    case substrate::LinkOutcome::lost:
      ++stats_.messages_lost;
      return false;
    case substrate::LinkOutcome::corrupted:
      // The receiver's digest check catches the flipped bit.
      if (!substrate::open(sealed)) {
        ++stats_.messages_corrupted;
        return false;
      }
      return true;
    case substrate::LinkOutcome::delivered:
      return true;
  }
  return false;
}

IngestReceipt Network::ingest(const ledger::LedgerEntry& entry) {
  const auto now = clock_.now();
  const auto& id = entry.id();
  if (records_.contains(id)) {
    throw Error(Errc::invalid_argument, fmt::format("entry id '{}' was already submitted", id));
  }
  auto& rec = records_[id];
  rec.id = id;
  rec.submitted_at = now;
  auto reject = [&](Errc code, std::string reason) {
    rec.status = EntryStatus::rejected;
    rec.finished_at = now;
    rec.reason = reason;
    trace_.record(now, "gateway", "reject", fmt::format("{}: {}", id, reason));
    throw Error(code, fmt::format("{}: {}", id, reason));
  };

  auto payload = ledger::encode_entry(entry);
  auto message = substrate::seal(payload);
  if (!transmit(message)) reject(Errc::message_lost, "lost on the client link");
  ++meter_.gateway_invocations;

  const auto* key = config_->principal_key(entry.submitter());
  if (!key) reject(Errc::unknown_principal, fmt::format("unknown submitter '{}'", entry.submitter()));
  if (!ledger::verify_entry(entry, *key)) reject(Errc::bad_signature, "bad signature");

  const auto receipt = queue_.enqueue(std::move(payload), now);
  ++meter_.queue_ops;
  rec.enqueued_at = now;
  decoded_.emplace(receipt, entry);
  if (const auto* tx = entry.transaction(); tx && tx->group.grouped()) ++grouped_pending_;
  receipt_ids_.emplace(receipt, id);
  trace_.record(now, "gateway", "enqueue", fmt::format("{} receipt={}", id, receipt));
  return IngestReceipt{receipt, now};
}

IngestReceipt Network::ingest_payload(ByteView payload) {
  return ingest(ledger::decode_entry(payload));
}

void Network::submit_at(SimTime at, EntryFactory make) {
  ++pending_submissions_;
  clock_.schedule_at(at, [this, make = std::move(make)] {
    --pending_submissions_;
    try {
      ingest(make());
    } catch (const Error&) {
      // Recorded as rejected; the client sees the error.
    }
    poke();
  });
}

void Network::schedule_wake(SimTime at) {
  if (!wakes_.insert(at).second) return;
  clock_.schedule_at(at, [this, at] {
    wakes_.erase(at);
    poke();
  });
}

void Network::poke() {
  if (busy_) return;
  const auto now = clock_.now();
  auto sel = select(now);
  if (sel.group_expiry) schedule_wake(*sel.group_expiry);
  if (sel.receipts.empty()) {
    if (auto t = queue_.next_visible_after(now)) schedule_wake(*t);
    return;
  }
  if (sel.receipts.size() >= config_->max_block_size || (sel.deadline && now >= *sel.deadline)) {
    busy_ = true;
    auto out = run_round();
    SimTime end = out.finished_at;
    if (out.result == RoundResult::stalled) end = std::max(end, now + options_.latency.vote_timeout);
    clock_.schedule_at(std::max(end, now), [this] {
      busy_ = false;
      poke();
    });
    return;
  }
  if (sel.deadline) schedule_wake(*sel.deadline);
  if (auto t = queue_.next_visible_after(now)) schedule_wake(*t);
}

bool Network::run(SimTime limit) {
  auto drained = [this] {
    return pending_submissions_ == 0 && !busy_ && queue_.depth() == 0;
  };
  while (!drained()) {
    auto next = clock_.next_event_time();
    if (!next || *next > limit) break;
    clock_.step();
  }
  return drained();
}

void Network::settle(SimTime t) {
  if (t > clock_.now()) clock_.run_until(t);
  resync_lagging();
}

}  // namespace sledger::consensus
