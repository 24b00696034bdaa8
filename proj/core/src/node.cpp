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

#include "sledger/node.hpp"

#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "sledger/error.hpp"
#include "sledger/world_state.hpp"

namespace sledger::consensus {
namespace {

std::string ledger_key(std::uint64_t height) { return fmt::format("ledger/{:020}", height); }
std::string pending_key(std::string_view block_id) { return fmt::format("pending/{}", block_id); }

std::string join(const std::vector<std::string>& parts) {
  return fmt::format("{}", fmt::join(parts, "; "));
}

}  // namespace

std::string_view node_status_name(NodeStatus status) {
  switch (status) {
    case NodeStatus::active: return "active";
    case NodeStatus::crashed: return "crashed";
    case NodeStatus::lagging: return "lagging";
  }
  return "unknown";
}

void apply_block_state(substrate::KVStore& store, std::string_view prefix,
                       const ledger::Block& block, std::size_t threads) {
  const auto& lanes = block.schedule;
  std::vector<std::vector<state::StateWrite>> effects(lanes.size());
  auto compute = [&](std::size_t lane) {
    for (auto idx : lanes[lane]) {
      auto writes = state::entry_effects(block.entries[idx]);
      std::move(writes.begin(), writes.end(), std::back_inserter(effects[lane]));
    }
  };
  const auto workers = std::min(threads, lanes.size());
  if (workers <= 1) {
    for (std::size_t l = 0; l < lanes.size(); ++l) compute(l);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t l = w; l < lanes.size(); l += workers) compute(l);
      });
    }
    for (auto& t : pool) t.join();
  }
  // Lanes touch disjoint keys, so the commit order across lanes does not
  // change the result.
  std::string key(prefix);
  for (auto& lane : effects) {
    for (auto& w : lane) {
      key.resize(prefix.size());
      key += w.key;
      store.write_conditional(key, std::move(w.value), std::nullopt);
    }
  }
}

Node::Node(std::string id, KeyPair keys, std::shared_ptr<const ledger::ChainConfig> config,
           NodeOptions options)
    : account_(id), keys_(std::move(keys)), config_(std::move(config)), options_(options) {
  if (!config_->is_node(account_.id)) {
    throw Error(Errc::invalid_config, fmt::format("'{}' is not a configured node", account_.id));
  }
}

void Node::bootstrap(const ledger::Block& genesis) {
  if (!chain_.empty()) throw Error(Errc::invalid_argument, "node already bootstrapped");
  if (auto defect = block_defect(*config_, genesis, 0, Digest::zero())) {
    throw ChainVerificationError(0, *defect);
  }
  commit(genesis);
}

const ledger::CodeArtifact* Node::agreed_code(std::string_view name) const {
  auto it = code_.find(name);
  return it == code_.end() ? nullptr : &it->second;
}

bool Node::holds_pending(std::string_view block_id) const {
  return pending_.find(block_id) != pending_.end();
}

Digest Node::state_digest() const { return state::state_digest(account_.kv, kStatePrefix); }

std::map<std::string, Value> Node::scoped_read(std::string_view principal,
                                               const acl::ReadScope& scope) const {
  return acl::scoped_read(account_.kv, kStatePrefix, acl_, principal, scope);
}

std::vector<Offense> Node::validate_entries(const ledger::Block& block) const {
  using namespace ledger;
  std::vector<Offense> out;
  std::vector<bool> bad(block.entries.size(), false);
  auto offend = [&](std::size_t i, std::string reason) {
    if (bad[i]) return;
    bad[i] = true;
    out.push_back(Offense{static_cast<std::uint32_t>(i), block.entries[i].id(), std::move(reason)});
  };

  // Scratch view of the state as it evolves through the block, so every
  // entry is judged exactly as sequential execution would judge it.
  auto spec = spec_;
  std::optional<acl::AclState> scratch_acl;
  auto acl = [&]() -> const acl::AclState& { return scratch_acl ? *scratch_acl : acl_; };
  auto mutable_acl = [&]() -> acl::AclState& {
    if (!scratch_acl) scratch_acl = acl_;
    return *scratch_acl;
  };
  std::unordered_map<std::string, std::uint64_t> block_writes;
  std::set<std::string, std::less<>> new_rows;
  std::set<std::string, std::less<>> ids;
  std::map<std::string, std::uint32_t, std::less<>> code_versions;
  for (const auto& [name, artifact] : code_) code_versions[name] = artifact.version;

  const auto rows = [&](const std::string& prefix) {
    return new_rows.contains(prefix) ||
           account_.kv.has_prefix(std::string(kStatePrefix) + prefix);
  };
  auto check_artifact = [&](const CodeArtifact& a) -> std::optional<std::string> {
    const auto* blob = account_.blobs.find(substrate::FunctionRegistry::code_key(a.name, a.version));
    if (!blob) return fmt::format("code {} v{} is not stored", a.name, a.version);
    if (!blob->embargoed) return fmt::format("code {} v{} is not embargoed", a.name, a.version);
    if (blob->digest != a.digest) {
      return fmt::format("code {} v{} digest mismatch", a.name, a.version);
    }
    return std::nullopt;
  };

  for (std::size_t i = 0; i < block.entries.size(); ++i) {
    const auto& entry = block.entries[i];
    if (!ids.insert(entry.id()).second) {
      offend(i, "duplicate entry id in block");
      continue;
    }
    const auto* key = config_->principal_key(entry.submitter());
    if (!key) {
      offend(i, fmt::format("unknown submitter '{}'", entry.submitter()));
      continue;
    }
    if (!verify_entry(entry, *key)) {
      offend(i, "bad signature");
      continue;
    }

    if (const auto* tx = entry.transaction()) {
      if (committed_txs_.contains(tx->tx_id)) {
        offend(i, "transaction already committed");
        continue;
      }
      if (tx->schema_digest != spec->digest()) {
        offend(i, fmt::format("built against schema {}, head is {}",
                              tx->schema_digest.short_hex(), spec->digest().short_hex()));
        continue;
      }
      auto violations = schema::validate_payload(*spec, *tx, rows);
      if (!violations.empty()) {
        offend(i, violations.front().str());
        continue;
      }
      std::optional<std::string> problem;
      for (const auto& w : tx->writes) {
        if (!acl().allows(tx->submitter, w.key.path(), AclMode::write)) {
          problem = fmt::format("write on {} denied for {}", w.key.path(), tx->submitter);
          break;
        }
      }
      for (const auto& r : tx->reads) {
        if (problem) break;
        auto it = block_writes.find(r.key);
        const auto current = account_.kv.version(std::string(kStatePrefix) + r.key) +
                             (it == block_writes.end() ? 0 : it->second);
        if (current != r.version) {
          problem = fmt::format("stale read of {} (declared v{}, current v{})", r.key, r.version,
                                current);
        }
      }
      if (problem) {
        offend(i, *problem);
        continue;
      }
      for (const auto& w : tx->writes) {
        ++block_writes[w.key.state_key()];
        new_rows.insert(w.key.row_prefix());
      }
    } else if (const auto* upd = std::get_if<AclUpdate>(&entry.body)) {
      auto problems = acl().check_update(*upd);
      if (!problems.empty()) {
        offend(i, problems.front());
        continue;
      }
      mutable_acl().apply(*upd, block.height);
    } else if (const auto* evo = std::get_if<SchemaEvolution>(&entry.body)) {
      if (!config_->is_node(evo->submitter)) {
        offend(i, "schema evolution must come from a node");
        continue;
      }
      std::shared_ptr<const schema::CompiledChainSpec> next;
      try {
        next = std::make_shared<const schema::CompiledChainSpec>(
            schema::compile_schema_json(evo->schema_json));
      } catch (const schema::SchemaError& e) {
        offend(i, e.diagnostics().empty() ? e.what() : e.diagnostics().front().str());
        continue;
      }
      if (next->digest() != evo->schema_digest) {
        offend(i, "declared schema digest does not match the document");
        continue;
      }
      auto diags = schema::check_additive(*spec, *next);
      if (!diags.empty()) {
        offend(i, diags.front().str());
        continue;
      }
      spec = next;
      mutable_acl().set_schema(spec);
    } else if (const auto* agreement = std::get_if<CodeAgreement>(&entry.body)) {
      if (!config_->is_node(agreement->submitter)) {
        offend(i, "code agreement must come from a node");
        continue;
      }
      std::optional<std::string> problem;
      for (const auto& a : agreement->artifacts) {
        if ((problem = check_artifact(a))) break;
      }
      if (problem) {
        offend(i, *problem);
        continue;
      }
      for (const auto& a : agreement->artifacts) code_versions[a.name] = a.version;
    } else if (const auto* sw = std::get_if<SoftwareUpdate>(&entry.body)) {
      if (!config_->is_node(sw->submitter)) {
        offend(i, "software update must come from a node");
        continue;
      }
      auto it = code_versions.find(sw->artifact.name);
      if (it != code_versions.end() && sw->artifact.version <= it->second) {
        offend(i, fmt::format("{} v{} does not advance v{}", sw->artifact.name,
                              sw->artifact.version, it->second));
        continue;
      }
      if (auto problem = check_artifact(sw->artifact)) {
        offend(i, *problem);
        continue;
      }
      code_versions[sw->artifact.name] = sw->artifact.version;
    }
  }

  // Atomic groups: complete, correctly ordered, and all-or-nothing.
  struct GroupSeen {
    std::vector<std::size_t> members;
    const AtomicGroup* group = nullptr;
  };
  std::map<std::string, GroupSeen> groups;
  for (std::size_t i = 0; i < block.entries.size(); ++i) {
    const auto* tx = block.entries[i].transaction();
    if (!tx || !tx->group.grouped()) continue;
    auto& g = groups[tx->group.id];
    g.members.push_back(i);
    g.group = &tx->group;
  }
  for (const auto& [gid, g] : groups) {
    std::optional<std::string> reason;
    if (g.members.size() != g.group->size) {
      reason = fmt::format("atomic group {} incomplete ({} of {})", gid, g.members.size(),
                           g.group->size);
    } else if (g.group->mode == GroupMode::ordered) {
      for (std::size_t k = 0; k < g.members.size(); ++k) {
        if (block.entries[g.members[k]].transaction()->group.index != k) {
          reason = fmt::format("ordered group {} out of order", gid);
          break;
        }
      }
    }
    if (!reason) {
      for (auto m : g.members) {
        if (bad[m]) reason = fmt::format("atomic group {} has a rejected member", gid);
      }
    }
    if (reason) {
      for (auto m : g.members) offend(m, *reason);
    }
  }
  return out;
}

VerifyReply Node::verify(const BlockProposal& proposal) {
  const auto& block = proposal.block;
  if (block.height != height() + 1 || block.prev_hash != head_hash()) {
    throw Error(Errc::stale_head, fmt::format("{}: proposal for height {} does not extend head {}",
                                              id(), block.height, height()));
  }
  VerifyReply reply;
  auto block_level = [&](std::string reason) {
    reply.offenses.push_back(Offense{kBlockLevel, block.block_id, std::move(reason)});
  };
  if (block.block_id.empty()) block_level("empty block id");
  if (block.entries.empty()) block_level("empty block");
  if (block.compute_content_hash() != block.content_hash) block_level("content hash mismatch");
  const auto* orchestrator = agreed_code("orchestrator");
  if (!orchestrator || orchestrator->digest != proposal.orchestration_digest) {
    block_level("orchestration digest does not match the agreed orchestrator");
  }
  if (block.schedule != partition_conflicts(block.entries)) {
    block_level("schedule differs from the conflict partition");
  }
  auto offenses = validate_entries(block);
  reply.offenses.insert(reply.offenses.end(), offenses.begin(), offenses.end());

  const bool yes = reply.offenses.empty();
  reply.vote = ledger::make_vote(id(), block.block_id, block.content_hash, yes, keys_);

  ledger::Block held = block;
  held.certificate = {};
  held.status = ledger::BlockStatus::pending;
  account_.kv.write_conditional(pending_key(held.block_id), ledger::encode_block(held),
                                std::nullopt);
  pending_.insert_or_assign(held.block_id, std::move(held));
  return reply;
}

void Node::apply(const ledger::Block& certified) {
  auto it = pending_.find(certified.block_id);
  if (it == pending_.end()) {
    throw Error(Errc::stale_head,
                fmt::format("{}: no pending block '{}'", id(), certified.block_id));
  }
  const auto& held = it->second;
  if (certified.content_hash != held.content_hash ||
      certified.compute_content_hash() != held.content_hash) {
    throw Error(Errc::invalid_certificate,
                fmt::format("{}: block '{}' differs from the held pending block", id(),
                            certified.block_id));
  }
  if (held.height != height() + 1 || held.prev_hash != head_hash()) {
    throw Error(Errc::stale_head, fmt::format("{}: pending block '{}' no longer extends head",
                                              id(), held.block_id));
  }
  ledger::Block block = held;
  block.certificate = certified.certificate;
  auto check = check_certificate(*config_, block, config_->policy);
  if (!check.deficiencies.empty()) {
    throw Error(Errc::invalid_certificate,
                fmt::format("{}: refused '{}': {}", id(), block.block_id, join(check.deficiencies)));
  }
  if (!check.met()) {
    throw Error(Errc::invalid_certificate,
                fmt::format("{}: refused '{}': {} valid yes votes, threshold {}", id(),
                            block.block_id, check.valid_yes, check.threshold));
  }
  block.status = ledger::BlockStatus::committed;
  commit(std::move(block));
}

void Node::record_aborted(const ledger::Block& aborted) {
  if (aborted.height != height() + 1 || aborted.prev_hash != head_hash()) {
    throw Error(Errc::stale_head, fmt::format("{}: abort record for height {} does not extend {}",
                                              id(), aborted.height, height()));
  }
  if (aborted.status != ledger::BlockStatus::aborted ||
      aborted.compute_content_hash() != aborted.content_hash) {
    throw Error(Errc::invalid_certificate, fmt::format("{}: malformed abort record", id()));
  }
  auto check = check_certificate(*config_, aborted, config_->policy);
  if (!check.deficiencies.empty() || check.met()) {
    throw Error(Errc::invalid_certificate,
                fmt::format("{}: abort record for '{}' has an inconsistent certificate", id(),
                            aborted.block_id));
  }
  append(aborted);
}

std::size_t Node::resync(std::span<const ledger::Block> source) {
  const auto head = height();
  if (source.size() <= head + 1) return 0;
  if (source[head].height != head || source[head].content_hash != head_hash()) {
    throw ChainVerificationError(head, "source diverges from the local head");
  }
  Digest prev = head_hash();
  for (std::uint64_t h = head + 1; h < source.size(); ++h) {
    if (auto defect = block_defect(*config_, source[h], h, prev)) {
      throw ChainVerificationError(h, *defect);
    }
    prev = source[h].content_hash;
  }
  for (std::uint64_t h = head + 1; h < source.size(); ++h) {
    if (source[h].status == ledger::BlockStatus::committed) {
      commit(source[h]);
    } else {
      append(source[h]);
    }
  }
  return source.size() - head - 1;
}

void Node::commit(ledger::Block block) {
  using namespace ledger;
  apply_block_state(account_.kv, kStatePrefix, block, options_.apply_threads);
  for (const auto& entry : block.entries) {
    if (const auto* tx = entry.transaction()) {
      committed_txs_.insert(tx->tx_id);
    } else if (const auto* upd = std::get_if<AclUpdate>(&entry.body)) {
      acl_.apply(*upd, block.height);
    } else if (const auto* evo = std::get_if<SchemaEvolution>(&entry.body)) {
      spec_ = std::make_shared<const schema::CompiledChainSpec>(
          schema::compile_schema_json(evo->schema_json));
      acl_.set_schema(spec_);
    } else if (const auto* agreement = std::get_if<CodeAgreement>(&entry.body)) {
      for (const auto& a : agreement->artifacts) code_[a.name] = a;
    } else if (const auto* sw = std::get_if<SoftwareUpdate>(&entry.body)) {
      code_[sw->artifact.name] = sw->artifact;
    }
  }
  append(std::move(block));
}

void Node::append(ledger::Block block) {
  account_.kv.write_conditional(ledger_key(block.height), ledger::encode_block(block),
                                std::nullopt);
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (it->second.height <= block.height) {
      account_.kv.erase(pending_key(it->first));
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
  chain_.push_back(std::move(block));
}

}  // namespace sledger::consensus
