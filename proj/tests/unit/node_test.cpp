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
#include <gtest/gtest.h>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sledger/node.hpp"
#include "sledger/world_state.hpp"

namespace {

using namespace sledger;
using namespace sledger::consensus;
using ledger::Block;
using ledger::LedgerEntry;
using ledger::PolicyMode;
namespace st = sledger::testing;

Block propose(Network& net, std::vector<LedgerEntry> entries, std::string id = {}) {
  const auto& ref = net.reference_node();
  return st::make_block(ref.height() + 1, ref.head_hash(), std::move(entries), std::move(id));
}

// Runs verify on every node and returns the certified block.
Block certify(Network& net, const Block& block, std::vector<VerifyReply>* replies = nullptr) {
  BlockProposal p{block, net.orchestrator_digest()};
  Block out = block;
  out.certificate = {block.block_id, block.content_hash, {}};
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    auto r = net.node(i).verify(p);
    out.certificate.votes.push_back(r.vote);
    if (replies) replies->push_back(std::move(r));
  }
  return out;
}

TEST(Node, VerifyApplyMatchesSequentialOracle) {
  auto t = st::make_network(4, PolicyMode::majority, st::untraced());
  auto& net = *t.net;
  std::vector<LedgerEntry> entries;
  entries.push_back({t.tx("a", "c0", {st::kv_write("r1", "f0", "x"), st::kv_write("r2", "f1", "y")})});
  entries.push_back({t.tx("b", "c1", {st::kv_write("r3", "f0", "z")})});
  entries.push_back({t.tx("c", "c0", {st::kv_write("r1", "f0", "w")})});
  auto block = propose(net, entries);
  ASSERT_EQ(block.schedule.size(), 2u);
  std::vector<VerifyReply> replies;
  auto certified = certify(net, block, &replies);
  for (const auto& r : replies) {
    EXPECT_TRUE(r.vote.yes);
    EXPECT_TRUE(r.offenses.empty());
  }
  for (std::size_t i = 0; i < net.node_count(); ++i) net.node(i).apply(certified);

  st::UserState expected;
  certified.status = ledger::BlockStatus::committed;
  st::sequential_apply(expected, certified);
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    const auto& n = net.node(i);
    EXPECT_EQ(n.height(), 1u);
    EXPECT_EQ(st::user_state(n.account().kv, kStatePrefix), expected);
    EXPECT_EQ(n.state_digest(), net.node(0).state_digest());
    EXPECT_TRUE(n.has_committed("c"));
  }
  EXPECT_EQ(Value::from_encoded(expected.at("kv/r1/f0").first).as_string(), "w");
  EXPECT_EQ(expected.at("kv/r1/f0").second, 2u);
}

TEST(Node, VerifyFlagsStaleReadsAndDuplicates) {
  auto t = st::make_network(4, PolicyMode::majority, st::untraced());
  auto& net = *t.net;
  auto first = certify(net, propose(net, {{t.tx("a", "c0", {st::kv_write("r1", "f0", "x")})}}));
  for (std::size_t i = 0; i < 4; ++i) net.node(i).apply(first);

  std::vector<LedgerEntry> entries;
  entries.push_back({t.tx("ok", "c0", {st::kv_write("r2", "f0", "x")}, {{"kv/r1/f0", 1}})});
  entries.push_back({t.tx("stale", "c0", {st::kv_write("r3", "f0", "x")}, {{"kv/r1/f0", 0}})});
  entries.push_back({t.tx("a", "c0", {st::kv_write("r4", "f0", "x")})});
  std::vector<VerifyReply> replies;
  certify(net, propose(net, entries), &replies);
  for (const auto& r : replies) {
    EXPECT_FALSE(r.vote.yes);
    std::set<std::uint32_t> flagged;
    for (const auto& o : r.offenses) flagged.insert(o.index);
    EXPECT_EQ(flagged, (std::set<std::uint32_t>{1, 2}));
  }
}

TEST(Node, VerifyRejectsForeignOrchestratorAndBadHash) {
  auto t = st::make_network(3, PolicyMode::majority, st::untraced());
  auto& net = *t.net;
  auto block = propose(net, {{t.tx("a", "c0", {st::kv_write("r1", "f0", "x")})}});
  auto r = net.node(0).verify({block, hash_content(to_bytes("other orchestrator"))});
  EXPECT_FALSE(r.vote.yes);
  ASSERT_FALSE(r.offenses.empty());
  EXPECT_EQ(r.offenses[0].index, kBlockLevel);

  auto tampered = block;
  tampered.content_hash.bytes[5] ^= 0x10;
  EXPECT_FALSE(net.node(1).verify({tampered, net.orchestrator_digest()}).vote.yes);

  auto wrong_height = block;
  wrong_height.height = 5;
  wrong_height.seal();
  try {
    net.node(2).verify({wrong_height, net.orchestrator_digest()});
    FAIL() << "expected stale_head";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::stale_head);
  }
}

TEST(Node, ApplyEnforcesThresholdPerPolicy) {
  for (auto policy : {PolicyMode::all, PolicyMode::majority, PolicyMode::bft_majority}) {
    for (std::size_t n : {1u, 4u, 7u}) {
      auto t = st::make_network(n, policy, st::untraced());
      auto& net = *t.net;
      const auto need = st::oracle_threshold(policy, n);
      for (std::size_t yes = 0; yes <= n; ++yes) {
        auto block = propose(net, {{t.tx(fmt::format("t{}", yes), "c0",
                                         {st::kv_write("r", "f0", fmt::format("{}", yes))})}},
                             fmt::format("blk-{}", yes));
        BlockProposal p{block, net.orchestrator_digest()};
        for (std::size_t i = 0; i < n; ++i) net.node(i).verify(p);
        auto certified = block;
        certified.certificate = st::make_certificate(net.config(), net.keys(), block, yes);
        auto& node = net.node(0);
        const auto before = node.height();
        if (yes >= need) {
          node.apply(certified);
          EXPECT_EQ(node.height(), before + 1);
          // Keep the other nodes in step for the next iteration.
          for (std::size_t i = 1; i < n; ++i) net.node(i).apply(certified);
        } else {
          try {
            node.apply(certified);
            ADD_FAILURE() << "accepted " << yes << "/" << n;
          } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::invalid_certificate);
          }
          EXPECT_EQ(node.height(), before);
        }
      }
    }
  }
}

TEST(Node, ApplyWithoutPendingBlockIsStale) {
  auto t = st::make_network(2, PolicyMode::all, st::untraced());
  auto block = propose(*t.net, {{t.tx("a", "c0", {st::kv_write("r", "f0", "x")})}});
  block.certificate = st::make_certificate(t.net->config(), t.net->keys(), block, 2);
  try {
    t.net->node(0).apply(block);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::stale_head);
  }
}

TEST(Node, ResyncVerifiesBeforeApplying) {
  auto t = st::make_network(4, PolicyMode::majority, st::untraced());
  auto& net = *t.net;
  // Node 3 misses three blocks.
  for (int k = 0; k < 3; ++k) {
    auto block = propose(net, {{t.tx(fmt::format("t{}", k), "c0",
                                     {st::kv_write(fmt::format("r{}", k), "f0", "v")})}});
    BlockProposal p{block, net.orchestrator_digest()};
    auto certified = block;
    certified.certificate = {block.block_id, block.content_hash, {}};
    for (std::size_t i = 0; i < 3; ++i) certified.certificate.votes.push_back(net.node(i).verify(p).vote);
    for (std::size_t i = 0; i < 3; ++i) net.node(i).apply(certified);
  }
  auto source = std::vector<Block>(net.node(0).chain().begin(), net.node(0).chain().end());
  auto& lagging = net.node(3);

  auto tampered = source;
  std::get<ledger::Transaction>(tampered[2].entries[0].body).writes[0].value = Value::string("evil");
  try {
    lagging.resync(tampered);
    FAIL();
  } catch (const ChainVerificationError& e) {
    EXPECT_EQ(e.height(), 2u);
  }
  EXPECT_EQ(lagging.height(), 0u);

  EXPECT_EQ(lagging.resync(source), 3u);
  EXPECT_EQ(lagging.state_digest(), net.node(0).state_digest());
  EXPECT_EQ(lagging.resync(source), 0u);
}

TEST(ApplyBlockState, ThreadCountDoesNotChangeResult) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    substrate::Rng rng(seed);
    auto entries = st::random_writes(rng, static_cast<std::size_t>(rng.uniform_int(1, 400)),
                                     static_cast<std::uint32_t>(rng.uniform_int(1, 300)), 2);
    auto block = st::make_block(1, Digest::zero(), std::move(entries));
    block.status = ledger::BlockStatus::committed;
    st::UserState expected;
    st::sequential_apply(expected, block);
    for (std::size_t threads : {1u, 2u, 5u}) {
      substrate::KVStore store;
      apply_block_state(store, "p:", block, threads);
      ASSERT_EQ(st::user_state(store, "p:"), expected) << seed << "/" << threads;
    }
  }
}

}  // namespace
