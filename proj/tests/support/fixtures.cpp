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
#include "fixtures.hpp"

#include <fmt/format.h>

namespace sledger::testing {

std::vector<std::string> ids(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(fmt::format("{}{}", prefix, i));
  return out;
}

schema::CompiledChainSpec kv_spec(std::uint32_t fields) {
  return schema::compile_schema_json(sim::default_schema_json(fields));
}

ledger::Transaction make_tx(const KeyRing& keys, std::string id, std::string submitter,
                            const Digest& schema_digest, std::vector<ledger::WriteOp> writes,
                            std::vector<ledger::ReadDecl> reads) {
  ledger::Transaction tx;
  tx.tx_id = std::move(id);
  tx.submitter = std::move(submitter);
  tx.schema_digest = schema_digest;
  tx.writes = std::move(writes);
  tx.reads = std::move(reads);
  ledger::sign_transaction(tx, keys.keys(tx.submitter));
  return tx;
}

ledger::WriteOp kv_write(const std::string& row, const std::string& field, std::string value) {
  return {FieldKey{"kv", row, field}, Value::string(std::move(value))};
}

std::vector<ledger::LedgerEntry> random_writes(substrate::Rng& rng, std::size_t count,
                                               std::uint32_t key_space, std::uint32_t fields) {
  std::vector<ledger::LedgerEntry> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ledger::Transaction tx;
    tx.tx_id = fmt::format("t{}", i);
    tx.submitter = "c0";
    const auto nw = rng.uniform_int(1, 3);
    for (std::int64_t k = 0; k < nw; ++k) {
      auto row = fmt::format("r{}", rng.uniform_int(0, key_space - 1));
      auto field = fmt::format("f{}", rng.uniform_int(0, fields - 1));
      tx.writes.push_back(kv_write(row, field, fmt::format("v{}-{}", i, k)));
    }
    out.push_back(ledger::LedgerEntry{std::move(tx)});
  }
  return out;
}

ledger::Block make_block(std::uint64_t height, const Digest& prev,
                         std::vector<ledger::LedgerEntry> entries, std::string id) {
  ledger::Block b;
  b.height = height;
  b.block_id = id.empty() ? fmt::format("b{}", height) : std::move(id);
  b.entries = std::move(entries);
  b.prev_hash = prev;
  b.schedule = consensus::partition_conflicts(b.entries);
  b.seal();
  return b;
}

ledger::VoteCertificate make_certificate(const ledger::ChainConfig& config, const KeyRing& keys,
                                         const ledger::Block& block, std::size_t yes) {
  ledger::VoteCertificate cert{block.block_id, block.content_hash, {}};
  for (std::size_t i = 0; i < config.nodes.size(); ++i) {
    const auto& id = config.nodes[i].id;
    cert.votes.push_back(
        ledger::make_vote(id, block.block_id, block.content_hash, i < yes, keys.keys(id)));
  }
  return cert;
}

sim::Scenario basic_scenario(std::size_t nodes, double tps, double duration_s,
                             std::uint64_t seed) {
  sim::Scenario s;
  s.name = fmt::format("basic-{}n", nodes);
  s.seed = seed;
  s.nodes = ids("n", nodes);
  s.clients = ids("c", 2);
  s.workload.rate_tps = tps;
  s.workload.duration_s = duration_s;
  s.workload.payload_fields = 2;
  s.schema_json = sim::default_schema_json(2);
  s.trace = false;
  return s;
}

ledger::Transaction TestNetwork::tx(std::string id, std::string submitter,
                                    std::vector<ledger::WriteOp> writes,
                                    std::vector<ledger::ReadDecl> reads) const {
  return make_tx(net->keys(), std::move(id), std::move(submitter),
                 net->reference_node().schema().digest(), std::move(writes), std::move(reads));
}

consensus::NetworkOptions untraced(std::uint64_t seed) {
  consensus::NetworkOptions o;
  o.seed = seed;
  o.trace = false;
  return o;
}

TestNetwork make_network(std::size_t nodes, ledger::PolicyMode policy,
                         consensus::NetworkOptions options, std::uint32_t fields,
                         std::size_t clients) {
  TestNetwork t{kv_spec(fields), nullptr};
  auto node_ids = ids("n", nodes);
  auto client_ids = ids("c", clients);
  auto m = consensus::make_membership(node_ids, client_ids, options.seed);
  m.config.policy = policy;
  t.net = consensus::provision_network(t.spec, std::move(m.config), std::move(m.keys),
                                       std::move(options));
  return t;
}

}  // namespace sledger::testing
