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
#pragma once

#include <string>
#include <vector>

#include <fmt/format.h>

#include "sledger/consensus.hpp"
#include "sledger/ledger_model.hpp"
#include "sledger/substrate.hpp"

namespace sledger::bench {

// Unsigned single-write transactions over `key_space` rows of table "kv".
inline std::vector<ledger::LedgerEntry> writes(std::size_t count, std::uint32_t key_space,
                                               std::uint64_t seed = 1) {
  substrate::Rng rng(seed);
  std::vector<ledger::LedgerEntry> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ledger::Transaction tx;
    tx.tx_id = fmt::format("t{}", i);
    tx.submitter = "c0";
    tx.writes.push_back({FieldKey{"kv", fmt::format("r{}", rng.uniform_int(0, key_space - 1)), "f0"},
                         Value::string(fmt::format("v{}", i))});
    out.push_back({std::move(tx)});
  }
  return out;
}

inline ledger::Block block_of(std::vector<ledger::LedgerEntry> entries) {
  ledger::Block b;
  b.height = 1;
  b.block_id = "b1";
  b.entries = std::move(entries);
  b.schedule = consensus::partition_conflicts(b.entries);
  b.status = ledger::BlockStatus::committed;
  b.seal();
  return b;
}

}  // namespace sledger::bench
