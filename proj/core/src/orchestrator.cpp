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

// Steps 2-4: batch selection, minting, the verify and apply fan-outs, and
// the adversarial orchestrator used to exercise certificate checks.

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "sledger/error.hpp"
#include "sledger/network.hpp"
#include "sledger/world_state.hpp"

namespace sledger::consensus {
namespace {

constexpr std::string_view kTamperedOrchestratorCode =
    "sledger orchestrator v1 (modified): certify without counting votes";

// Each exclusion pass removes at least one entry; this bounds pathological
// cascades.
constexpr int kMaxRemints = 16;

enum class NodeOp : std::uint8_t { verify = 1, apply = 2, abort = 3 };

Bytes request(NodeOp op, Bytes body) {
  Bytes out;
  out.reserve(body.size() + 1);
  out.push_back(static_cast<std::uint8_t>(op));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

}  // namespace

const ledger::LedgerEntry& Network::cached_entry(const substrate::QueueMessage& msg) {
  auto it = decoded_.find(msg.receipt);
  if (it == decoded_.end()) {
    it = decoded_.emplace(msg.receipt, ledger::decode_entry(msg.payload)).first;
    if (const auto* tx = it->second.transaction(); tx && tx->group.grouped()) ++grouped_pending_;
  }
  return it->second;
}

void Network::forget(std::uint64_t receipt) {
  auto it = decoded_.find(receipt);
  if (it == decoded_.end()) return;
  if (const auto* tx = it->second.transaction(); tx && tx->group.grouped()) --grouped_pending_;
  decoded_.erase(it);
}

Network::Selection Network::select(SimTime now) {
  Selection sel;
  const auto& ref = reference_node();
  const auto max_n = config_->max_block_size;
  // Without atomic groups in the queue only a block's worth (plus slack for
  // stale redeliveries) needs looking at.
  const auto limit = grouped_pending_ > 0 ? std::numeric_limits<std::size_t>::max()
                                          : static_cast<std::size_t>(max_n) + 64;
  auto visible = queue_.peek_visible(now, limit);

  std::map<std::string, std::vector<const substrate::QueueMessage*>> groups;
  for (const auto* m : visible) {
    const auto* tx = cached_entry(*m).transaction();
    if (tx && tx->group.grouped()) groups[tx->group.id].push_back(m);
  }

  std::set<std::string> seen_groups;
  auto take = [&](const substrate::QueueMessage& m, const ledger::LedgerEntry& e) {
    sel.receipts.push_back(m.receipt);
    const auto* tx = e.transaction();
    const std::uint32_t bound_ms =
        tx && tx->latency_bound_ms ? *tx->latency_bound_ms : config_->default_latency_bound_ms;
    const SimTime due = m.enqueued_at + substrate::millis(bound_ms) - options_.latency.expected_commit;
    if (!sel.deadline || due < *sel.deadline) sel.deadline = due;
  };

  // Settled only after the scan: acking erases the messages `visible`
  // points into.
  std::vector<std::uint64_t> stale;
  std::vector<std::pair<std::uint64_t, std::string>> doomed;
  for (const auto* m : visible) {
    if (sel.receipts.size() >= max_n) break;
    const auto& entry = cached_entry(*m);
    const auto rid = receipt_ids_.find(m->receipt);
    if (rid == receipt_ids_.end() || ref.has_committed(entry.id())) {
      stale.push_back(m->receipt);
      continue;
    }
    const auto* tx = entry.transaction();
    if (!tx || !tx->group.grouped()) {
      take(*m, entry);
      continue;
    }
    if (!seen_groups.insert(tx->group.id).second) continue;
    const auto& members = groups[tx->group.id];
    if (members.size() < tx->group.size) {
      if (now - members.front()->enqueued_at > options_.latency.group_timeout) {
        for (const auto* g : members) {
          doomed.emplace_back(g->receipt, "atomic group incomplete at timeout");
        }
      } else {
        const auto expiry = members.front()->enqueued_at + options_.latency.group_timeout + 1;
        if (!sel.group_expiry || expiry < *sel.group_expiry) sel.group_expiry = expiry;
      }
      continue;
    }
    if (members.size() > max_n) {
      for (const auto* g : members) {
        doomed.emplace_back(g->receipt, "atomic group exceeds the block size");
      }
      continue;
    }
    if (sel.receipts.size() + members.size() > max_n) break;
    for (const auto* g : members) take(*g, cached_entry(*g));
  }
  for (auto& [r, why] : doomed) finish(r, EntryStatus::rejected, now, 0, std::move(why));
  for (auto r : stale) {
    // Redelivery of something already settled.
    if (queue_.ack(r)) ++meter_.queue_ops;
    forget(r);
  }
  return sel;
}

std::optional<std::size_t> Network::choose_leader(SimTime now, std::uint64_t height) {
  const auto n = nodes_.size();
  const auto preferred = *config_->node_index(rotate_leader(*config_, height));
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = (preferred + k) % n;
    if (excluded_leader_ == i) continue;
    if (nodes_[i]->lagging() || options_.faults.is_crashed(nodes_[i]->id(), now)) continue;
    if (k > 0) ++stats_.leader_fallbacks;
    return i;
  }
  return std::nullopt;
}

ledger::Block Network::build_block(std::uint64_t height, const Digest& prev,
                                   std::vector<ledger::LedgerEntry> entries,
                                   std::string id) const {
  ledger::Block b;
  b.height = height;
  b.block_id = std::move(id);
  b.entries = std::move(entries);
  b.prev_hash = prev;
  b.schedule = partition_conflicts(b.entries);
  b.seal();
  return b;
}

std::size_t Network::state_writes(const ledger::Block& block) const {
  std::size_t n = 0;
  for (const auto& e : block.entries) {
    if (const auto* tx = e.transaction()) {
      n += tx->writes.size();
    } else if (const auto* a = std::get_if<ledger::CodeAgreement>(&e.body)) {
      n += a->artifacts.size();
    } else {
      n += 1;
    }
  }
  return n;
}

void Network::mark_lagging(std::size_t i, SimTime at, std::string_view why) {
  auto& n = *nodes_[i];
  if (n.lagging()) return;
  n.set_lagging(true);
  trace_.record(at, n.id(), "lagging", std::string(why));
}

void Network::finish(std::uint64_t receipt, EntryStatus status, SimTime at, std::uint64_t height,
                     std::string reason) {
  auto rid = receipt_ids_.find(receipt);
  if (rid != receipt_ids_.end()) {
    auto& rec = records_.at(rid->second);
    rec.status = status;
    rec.finished_at = at;
    rec.height = height;
    rec.reason = std::move(reason);
    receipt_ids_.erase(rid);
  }
  if (queue_.ack(receipt)) ++meter_.queue_ops;
  forget(receipt);
}

void Network::resync_lagging() {
  const auto now = clock_.now();
  const auto& source = reference_node();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& n = *nodes_[i];
    if (!n.lagging() || options_.faults.is_crashed(n.id(), now)) continue;
    const auto from = n.height();
    if (from == source.height()) {
      // Missed only rounds that left no block behind.
      n.set_lagging(false);
      continue;
    }
    try {
      const auto taken = n.resync(source.chain());
      ++meter_.consensus_invocations;
      for (std::uint64_t h = from + 1; h <= n.height(); ++h) {
        const auto& b = n.chain()[h];
        meter_.kv_writes += 1;
        if (b.status == ledger::BlockStatus::committed) meter_.kv_writes += state_writes(b);
      }
      ++stats_.resyncs;
      n.set_lagging(false);
      trace_.record(now, n.id(), "resync",
                    fmt::format("from={} to={} blocks={} source={}", from, n.height(), taken,
                                source.id()));
    } catch (const ChainVerificationError& e) {
      trace_.record(now, n.id(), "resync-refused", e.what());
    }
  }
}

Network::VerifyRound Network::verify_phase(const BlockProposal& proposal, SimTime at) {
  const auto n = nodes_.size();
  VerifyRound vr;
  vr.delivered.assign(n, false);
  const auto input = request(NodeOp::verify, encode_proposal(proposal));
  auto& rng = clock_.rng();
  const auto deadline = at + options_.latency.vote_timeout;

  for (std::size_t i = 0; i < n; ++i) {
    auto& node = *nodes_[i];
    if (node.lagging()) continue;
    auto message = substrate::seal(input);
    const auto arrival = at + options_.latency.link.draw(rng);
    if (!transmit(message)) continue;
    substrate::Invocation inv;
    try {
      inv = node.account().functions.invoke(
          "node", 1, *substrate::open(message),
          substrate::InvokeContext{arrival, &rng, options_.latency.invoke, &options_.faults});
    } catch (const Error& e) {
      if (e.code() == Errc::stale_head) mark_lagging(i, arrival, e.what());
      continue;
    }
    ++meter_.consensus_invocations;
    ++meter_.kv_writes;  // pending block persisted
    vr.delivered[i] = true;
    auto reply = substrate::seal(inv.output);
    const auto back = inv.completes_at + options_.latency.link.draw(rng);
    if (!transmit(reply)) continue;
    auto decoded = decode_reply(*substrate::open(reply));
    trace_.record(inv.completes_at, node.id(), "vote",
                  fmt::format("{} {}", proposal.block.block_id, decoded.vote.yes ? "yes" : "no"));
    if (back > deadline) {
      trace_.record(back, "orchestrator", "late-vote", node.id());
      continue;
    }
    vr.replies.push_back(Reply{i, back, std::move(decoded)});
  }
  std::stable_sort(vr.replies.begin(), vr.replies.end(),
                   [](const Reply& a, const Reply& b) { return a.at < b.at; });

  const auto thr = threshold(config_->policy, n);
  std::size_t no = 0;
  bool decided = false;
  for (std::size_t k = 0; k < vr.replies.size(); ++k) {
    const auto& r = vr.replies[k];
    r.reply.vote.yes ? ++vr.yes : ++no;
    if (vr.yes >= thr || no > n - thr) {
      vr.met = vr.yes >= thr;
      vr.decided_at = r.at;
      vr.replies.resize(k + 1);
      decided = true;
      break;
    }
  }
  if (!decided) {
    vr.decided_at = vr.replies.size() == n ? vr.replies.back().at : deadline;
  }
  return vr;
}

Network::ApplyRound Network::apply_phase(const ledger::Block& certified,
                                         const std::vector<bool>& targets, SimTime at,
                                         bool forged) {
  ApplyRound ar;
  const auto input = request(NodeOp::apply, ledger::encode_block(certified));
  auto& rng = clock_.rng();
  bool missing = false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& node = *nodes_[i];
    if (!targets[i]) {
      if (!forged) mark_lagging(i, at, fmt::format("missed verify of {}", certified.block_id));
      missing = true;
      continue;
    }
    auto message = substrate::seal(input);
    const auto arrival = at + options_.latency.link.draw(rng);
    if (!transmit(message)) {
      if (!forged) mark_lagging(i, arrival, fmt::format("apply of {} lost", certified.block_id));
      missing = true;
      continue;
    }
    try {
      auto inv = node.account().functions.invoke(
          "node", 1, *substrate::open(message),
          substrate::InvokeContext{arrival, &rng, options_.latency.invoke, &options_.faults});
      ++meter_.consensus_invocations;
      meter_.kv_writes += 1 + state_writes(certified);
      ++ar.applied;
      ar.done.push_back(inv.completes_at + options_.latency.link.draw(rng));
      trace_.record(inv.completes_at, node.id(), "apply",
                    fmt::format("{} height={}", certified.block_id, certified.height));
    } catch (const Error& e) {
      missing = true;
      if (e.code() == Errc::crash_fault) {
        if (!forged) mark_lagging(i, arrival, "crashed during apply");
        continue;
      }
      ++meter_.consensus_invocations;
      if (forged) ++stats_.detections;
      trace_.record(arrival, node.id(), "refuse", e.what());
      if (!forged) mark_lagging(i, arrival, "apply refused");
    }
  }
  std::sort(ar.done.begin(), ar.done.end());
  ar.finished_at = ar.done.empty() ? at : ar.done.back();
  if (missing) ar.finished_at = std::max(ar.finished_at, at + options_.latency.vote_timeout);
  return ar;
}

void Network::abort_phase(const ledger::Block& aborted, SimTime at) {
  const auto input = request(NodeOp::abort, ledger::encode_block(aborted));
  auto& rng = clock_.rng();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& node = *nodes_[i];
    if (node.lagging()) continue;
    auto message = substrate::seal(input);
    const auto arrival = at + options_.latency.link.draw(rng);
    if (!transmit(message)) {
      mark_lagging(i, arrival, fmt::format("abort record {} lost", aborted.block_id));
      continue;
    }
    try {
      node.account().functions.invoke(
          "node", 1, *substrate::open(message),
          substrate::InvokeContext{arrival, &rng, options_.latency.invoke, &options_.faults});
      ++meter_.consensus_invocations;
      ++meter_.kv_writes;
    } catch (const Error& e) {
      mark_lagging(i, arrival, e.what());
    }
  }
}

ledger::LedgerEntry Network::forged_entry() {
  const auto& spec = reference_node().schema();
  const auto tables = spec.tables();
  ledger::Transaction tx;
  tx.tx_id = fmt::format("forged-{}", ++forged_seq_);
  tx.submitter = config_->clients.empty() ? config_->nodes.front().id : config_->clients.front().id;
  tx.schema_digest = spec.digest();
  if (!tables.empty() && !spec.table_fields(tables.front()).empty()) {
    tx.writes.push_back(ledger::WriteOp{
        FieldKey{tables.front(), "forged", spec.table_fields(tables.front()).front()},
        Value::string("forged")});
  }
  // The orchestrator holds no client keys, so the signature is noise.
  auto& rng = clock_.rng();
  for (auto& b : tx.signature.bytes) b = static_cast<std::uint8_t>(rng.next());
  tx.content_digest = hash_content(ledger::signing_bytes(tx));
  return ledger::LedgerEntry{std::move(tx)};
}

RoundOutcome Network::attack_round(Attack attack, RoundOutcome out, ledger::Block block,
                                   std::size_t leader, SimTime at) {
  auto& account = nodes_[leader]->account();
  auto& rng = clock_.rng();
  const substrate::InvokeContext ctx{at, &rng, options_.latency.invoke, &options_.faults};
  trace_.record(at, "orchestrator", "attack",
                fmt::format("{} {}", attack_name(attack), block.block_id));
  out.result = RoundResult::forged;

  if (attack == Attack::bad_digest) {
    if (!account.functions.contains("orchestrator", 2)) {
      account.functions.publish(account.blobs, "orchestrator", 2,
                                to_bytes(kTamperedOrchestratorCode),
                                [](ByteView input) { return Bytes(input.begin(), input.end()); });
    }
    auto inv = account.functions.invoke("orchestrator", 2, block.content_bytes(), ctx);
    ++meter_.consensus_invocations;
    auto vr = verify_phase(BlockProposal{block, inv.executed_digest}, inv.completes_at);
    for (const auto& r : vr.replies) {
      for (const auto& o : r.reply.offenses) {
        if (o.index == kBlockLevel) {
          ++stats_.detections;
          break;
        }
      }
    }
    excluded_leader_ = leader;
    out.result = RoundResult::vetoed;
    out.finished_at = vr.decided_at;
    return out;
  }

  auto inv = account.functions.invoke("orchestrator", 1, block.content_bytes(), ctx);
  ++meter_.consensus_invocations;
  const auto digest = inv.executed_digest;
  auto with_forged_entry = [&](std::string id) {
    auto entries = block.entries;
    entries.push_back(forged_entry());
    return build_block(block.height, block.prev_hash, std::move(entries), std::move(id));
  };

  ledger::Block target;
  std::vector<bool> delivered;
  SimTime apply_at = 0;
  switch (attack) {
    case Attack::forged_votes: {
      target = with_forged_entry(block.block_id + "-x");
      auto vr = verify_phase(BlockProposal{target, digest}, inv.completes_at);
      target.certificate = {target.block_id, target.content_hash, {}};
      for (const auto& m : config_->nodes) {
        ledger::Vote v{m.id, true, {}};
        for (auto& b : v.signature.bytes) b = static_cast<std::uint8_t>(rng.next());
        target.certificate.votes.push_back(std::move(v));
      }
      delivered = vr.delivered;
      apply_at = vr.decided_at;
      break;
    }
    case Attack::replayed_votes: {
      auto genuine = verify_phase(BlockProposal{block, digest}, inv.completes_at);
      target = with_forged_entry(block.block_id + "-x");
      auto vr = verify_phase(BlockProposal{target, digest}, genuine.decided_at);
      target.certificate = {target.block_id, target.content_hash, {}};
      for (const auto& r : genuine.replies) {
        if (r.reply.vote.yes) target.certificate.votes.push_back(r.reply.vote);
      }
      delivered = vr.delivered;
      apply_at = vr.decided_at;
      break;
    }
    case Attack::inflated_votes: {
      auto vr = verify_phase(BlockProposal{block, digest}, inv.completes_at);
      target = block;
      target.certificate = {block.block_id, block.content_hash, {}};
      auto yes = std::find_if(vr.replies.begin(), vr.replies.end(),
                              [](const Reply& r) { return r.reply.vote.yes; });
      if (yes != vr.replies.end()) {
        const auto copies = threshold(config_->policy, nodes_.size());
        target.certificate.votes.assign(copies, yes->reply.vote);
      }
      delivered = vr.delivered;
      apply_at = vr.decided_at;
      break;
    }
    case Attack::content_swap: {
      auto vr = verify_phase(BlockProposal{block, digest}, inv.completes_at);
      ledger::VoteCertificate genuine{block.block_id, block.content_hash, {}};
      for (const auto& r : vr.replies) genuine.votes.push_back(r.reply.vote);
      target = with_forged_entry(block.block_id);
      target.certificate = genuine;
      delivered = vr.delivered;
      apply_at = vr.decided_at;
      break;
    }
    default:
      throw Error(Errc::invalid_argument, "not an attack");
  }
  forged_ids_.insert(target.block_id);
  auto ar = apply_phase(target, delivered, apply_at, true);
  out.finished_at = ar.finished_at;
  return out;
}

RoundOutcome Network::run_round() {
  const auto t0 = clock_.now();
  ++stats_.rounds;
  RoundOutcome out;
  out.started_at = out.committed_at = out.finished_at = t0;

  resync_lagging();
  auto sel = select(t0);
  if (sel.receipts.empty()) return out;

  const auto& ref = reference_node();
  const auto height = ref.height() + 1;
  const auto prev = ref.head_hash();
  out.height = height;
  auto leader = choose_leader(t0, height);
  excluded_leader_.reset();
  if (!leader) {
    out.result = RoundResult::stalled;
    trace_.record(t0, "orchestrator", "stalled", "no live in-sync leader");
    return out;
  }
  auto& leader_node = *nodes_[*leader];
  out.leader = leader_node.id();

  std::vector<std::uint64_t> receipts = sel.receipts;
  std::vector<ledger::LedgerEntry> entries;
  entries.reserve(receipts.size());
  for (auto r : receipts) {
    queue_.receive(r, t0, options_.latency.visibility_timeout);
    ++meter_.queue_ops;
    entries.push_back(decoded_.at(r));
  }

  auto& rng = clock_.rng();
  Attack attack = Attack::none;
  if (options_.faults.nefarious_orchestrator) {
    if (forced_attack_) {
      attack = *forced_attack_;
      forced_attack_.reset();
    } else if (rng.bernoulli(0.5)) {
      attack = static_cast<Attack>(rng.uniform_int(1, 5));
    }
    if (attack == Attack::inflated_votes && threshold(config_->policy, nodes_.size()) < 2) {
      attack = Attack::forged_votes;
    }
  }

  const auto base_id = fmt::format("b{}-r{}", height, ++round_seq_);
  if (attack != Attack::none) {
    ++stats_.attacks;
    auto block = build_block(height, prev, std::move(entries), base_id);
    out.block_id = block.block_id;
    out.entries = block.entries.size();
    return attack_round(attack, out, std::move(block), *leader, t0);
  }

  SimTime t = t0;
  for (int attempt = 0;; ++attempt) {
    auto id = attempt == 0 ? base_id : fmt::format("{}.{}", base_id, attempt);
    auto block = build_block(height, prev, entries, std::move(id));
    out.block_id = block.block_id;
    out.entries = block.entries.size();

    substrate::Invocation inv;
    try {
      inv = leader_node.account().functions.invoke(
          "orchestrator", 1, block.content_bytes(),
          substrate::InvokeContext{t, &rng, options_.latency.invoke, &options_.faults});
    } catch (const Error&) {
      // Leader died mid-round; the batch stays in flight and reappears.
      out.result = RoundResult::stalled;
      out.finished_at = t + options_.latency.vote_timeout;
      return out;
    }
    ++meter_.consensus_invocations;
    trace_.record(t, "orchestrator", "mint",
                  fmt::format("{} height={} entries={} lanes={} leader={}", block.block_id, height,
                              block.entries.size(), block.schedule.size(), leader_node.id()));

    auto vr = verify_phase(BlockProposal{block, inv.executed_digest}, inv.completes_at);
    out.yes_votes = vr.yes;

    if (vr.met) {
      block.certificate = {block.block_id, block.content_hash, {}};
      for (const auto& r : vr.replies) block.certificate.votes.push_back(r.reply.vote);
      auto ar = apply_phase(block, vr.delivered, vr.decided_at, false);
      out.finished_at = ar.finished_at;
      if (ar.applied == 0) {
        out.result = RoundResult::stalled;
        return out;
      }
      const auto thr = threshold(config_->policy, nodes_.size());
      out.committed_at = ar.done.size() >= thr ? ar.done[thr - 1] : ar.done.back();
      for (auto r : receipts) finish(r, EntryStatus::committed, out.committed_at, height, {});
      ++stats_.blocks_committed;
      stats_.batch_sizes.push_back(static_cast<std::uint32_t>(block.entries.size()));
      out.result = RoundResult::committed;
      trace_.record(out.committed_at, "orchestrator", "commit",
                    fmt::format("{} height={} yes={}", block.block_id, height, vr.yes));
      break;
    }

    std::map<std::uint32_t, std::string> offending;
    bool block_level = false;
    for (const auto& r : vr.replies) {
      for (const auto& o : r.reply.offenses) {
        if (o.index == kBlockLevel) {
          block_level = true;
        } else if (o.index < entries.size()) {
          offending.emplace(o.index, o.reason);
        }
      }
    }
    if (!offending.empty() && !block_level && attempt < kMaxRemints) {
      std::vector<ledger::LedgerEntry> kept;
      std::vector<std::uint64_t> kept_receipts;
      for (std::size_t i = 0; i < entries.size(); ++i) {
        auto it = offending.find(static_cast<std::uint32_t>(i));
        if (it == offending.end()) {
          kept.push_back(std::move(entries[i]));
          kept_receipts.push_back(receipts[i]);
        } else {
          trace_.record(vr.decided_at, "orchestrator", "exclude",
                        fmt::format("{}: {}", entries[i].id(), it->second));
          finish(receipts[i], EntryStatus::rejected, vr.decided_at, 0, it->second);
        }
      }
      out.excluded += offending.size();
      ++stats_.remints;
      entries = std::move(kept);
      receipts = std::move(kept_receipts);
      t = vr.decided_at;
      out.finished_at = t;
      if (entries.empty()) {
        out.result = RoundResult::empty;
        return out;
      }
      continue;
    }

    block.status = ledger::BlockStatus::aborted;
    block.certificate = {block.block_id, block.content_hash, {}};
    for (const auto& r : vr.replies) block.certificate.votes.push_back(r.reply.vote);
    abort_phase(block, vr.decided_at);
    for (auto r : receipts) {
      finish(r, EntryStatus::aborted, vr.decided_at, height, "block aborted: quorum not reached");
    }
    ++stats_.blocks_aborted;
    out.result = RoundResult::aborted;
    out.finished_at = out.committed_at = vr.decided_at + options_.latency.link.max;
    trace_.record(vr.decided_at, "orchestrator", "abort",
                  fmt::format("{} height={} yes={}", block.block_id, height, vr.yes));
    break;
  }

  for (const auto& n : nodes_) {
    if (n->lagging()) out.lagging.push_back(n->id());
  }
  return out;
}

}  // namespace sledger::consensus
