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
// Shared builders for tests and the acceptance suite.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sledger/consensus.hpp"
#include "sledger/crypto.hpp"
#include "sledger/ledger_model.hpp"
#include "sledger/network.hpp"
#include "sledger/schema.hpp"
#include "sledger/simulation.hpp"
#include "sledger/substrate.hpp"

namespace sledger::testing {

std::vector<std::string> ids(const std::string& prefix, std::size_t n);

// "kv" table with string fields f0..f{fields-1}, public read/write.
schema::CompiledChainSpec kv_spec(std::uint32_t fields = 2);

ledger::Transaction make_tx(const KeyRing& keys, std::string id, std::string submitter,
                            const Digest& schema_digest, std::vector<ledger::WriteOp> writes,
                            std::vector<ledger::ReadDecl> reads = {});

ledger::WriteOp kv_write(const std::string& row, const std::string& field, std::string value);

// Unsigned transactions over rows r0..r{key_space-1}, 1-3 writes each,
// used where only state effects matter.
std::vector<ledger::LedgerEntry> random_writes(substrate::Rng& rng, std::size_t count,
                                               std::uint32_t key_space, std::uint32_t fields);

// Sealed block with the partition schedule; not certified.
ledger::Block make_block(std::uint64_t height, const Digest& prev,
                         std::vector<ledger::LedgerEntry> entries, std::string id = {});

// Certificate with the first `yes` nodes voting yes and the rest no.
ledger::VoteCertificate make_certificate(const ledger::ChainConfig& config, const KeyRing& keys,
                                         const ledger::Block& block, std::size_t yes);

// Constant-rate kv scenario with no faults and tracing off.
sim::Scenario basic_scenario(std::size_t nodes, double tps, double duration_s,
                             std::uint64_t seed);

struct TestNetwork {
  schema::CompiledChainSpec spec;
  std::unique_ptr<consensus::Network> net;

  consensus::Network* operator->() { return net.get(); }
  const consensus::Network* operator->() const { return net.get(); }
  ledger::Transaction tx(std::string id, std::string submitter,
                         std::vector<ledger::WriteOp> writes,
                         std::vector<ledger::ReadDecl> reads = {}) const;
};

// Default options with tracing off.
consensus::NetworkOptions untraced(std::uint64_t seed = 1);

TestNetwork make_network(std::size_t nodes, ledger::PolicyMode policy,
                         consensus::NetworkOptions options = {}, std::uint32_t fields = 2,
                         std::size_t clients = 2);

}  // namespace sledger::testing
