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

#include <cmath>

#include "sledger/error.hpp"
#include "sledger/substrate.hpp"

namespace {

using namespace sledger;
using namespace sledger::substrate;

TEST(Rng, EngineMatchesStandardSequence) {
  // The C++ standard fixes the 10000th output of a default-seeded
  // mt19937_64.
  Rng rng(5489);
  for (int i = 0; i < 9999; ++i) rng.next();
  EXPECT_EQ(rng.next(), 9981545732273789042ULL);
}

TEST(Rng, DistributionsStayInRange) {
  Rng rng(3);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    auto u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    auto k = rng.uniform_int(-3, 3);
    ASSERT_GE(k, -3);
    ASSERT_LE(k, 3);
    sum += rng.exponential(4.0);
  }
  EXPECT_NEAR(sum / 20000, 0.25, 0.01);
  EXPECT_EQ(rng.uniform_int(5, 5), 5);
}

TEST(SimClock, RunsEventsInTimeThenInsertionOrder) {
  SimClock clock(1);
  std::vector<int> order;
  clock.schedule_at(10, [&] { order.push_back(2); });
  clock.schedule_at(5, [&] { order.push_back(1); });
  clock.schedule_at(10, [&] { order.push_back(3); });
  clock.schedule_at(5, [&] {
    clock.schedule_after(0, [&] { order.push_back(4); });
  });
  clock.run_until(100);
  EXPECT_EQ(order, (std::vector<int>{1, 4, 2, 3}));
  EXPECT_EQ(clock.now(), 100);
  EXPECT_FALSE(clock.step());
}

TEST(SimClock, AdvanceRefusesToSkipEvents) {
  SimClock clock(1);
  clock.schedule_at(50, [] {});
  EXPECT_THROW(clock.advance_to(60), Error);
  clock.advance_to(40);
  EXPECT_EQ(clock.now(), 40);
}

TEST(DurableQueue, AtLeastOnceRedelivery) {
  DurableQueue q("gw");
  auto a = q.enqueue(Bytes{1}, 0);
  auto b = q.enqueue(Bytes{2}, 0);
  auto batch = q.receive_batch(10, 0, millis(100));
  ASSERT_EQ(batch.size(), 2u);
  EXPECT_EQ(batch[0].receipt, a);
  EXPECT_EQ(q.visible_depth(millis(50)), 0u);
  EXPECT_EQ(q.next_visible_after(millis(50)), millis(100));

  EXPECT_TRUE(q.ack(a));
  EXPECT_FALSE(q.ack(a));
  // b was never acknowledged, so it comes back.
  auto again = q.receive_batch(10, millis(100), millis(100));
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0].receipt, b);
  EXPECT_EQ(again[0].deliveries, 2u);
  EXPECT_THROW(q.enqueue(Bytes{}, 0), Error);
}

TEST(KVStore, ConditionalWrites) {
  KVStore kv("acct");
  EXPECT_EQ(kv.write_conditional("k", Bytes{1}, 0), 1u);
  try {
    kv.write_conditional("k", Bytes{2}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::version_conflict);
  }
  EXPECT_EQ(kv.get("k")->value, Bytes{1});  // unchanged after a conflict
  EXPECT_EQ(kv.write_conditional("k", Bytes{3}, 1), 2u);
  EXPECT_EQ(kv.write_conditional("k", Bytes{4}, std::nullopt), 3u);
  EXPECT_EQ(kv.version("missing"), 0u);
}

TEST(KVStore, PrefixScanIsOrderedAndBounded) {
  KVStore kv;
  for (auto k : {"b/2", "a/1", "b/1", "c", "b"}) kv.write_conditional(k, Bytes{0}, std::nullopt);
  auto scan = kv.scan_prefix("b/");
  ASSERT_EQ(scan.size(), 2u);
  EXPECT_EQ(scan[0].first, "b/1");
  EXPECT_EQ(scan[1].first, "b/2");
  EXPECT_TRUE(kv.has_prefix("a/"));
  EXPECT_FALSE(kv.has_prefix("d"));
}

TEST(BlobStore, EmbargoBindsOwnerToo) {
  BlobStore blobs("n0");
  blobs.put("open", Bytes{1}, false);
  blobs.put("open", Bytes{2}, false);
  blobs.remove("open");
  blobs.put("code", Bytes{9}, true);
  auto expect_violation = [](auto&& f) {
    try {
      f();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::immutability_violation);
    }
  };
  expect_violation([&] { blobs.put("code", Bytes{8}, false); });
  expect_violation([&] { blobs.remove("code"); });
  EXPECT_EQ(blobs.get("code").digest, hash_content(Bytes{9}));
}

TEST(FunctionRegistry, PublishedVersionsAreFrozen) {
  BlobStore blobs("n0");
  FunctionRegistry fns("n0");
  auto d = fns.publish(blobs, "echo", 1, to_bytes("code v1"),
                       [](ByteView in) { return Bytes(in.begin(), in.end()); });
  EXPECT_EQ(d, hash_content(to_bytes("code v1")));
  EXPECT_THROW(fns.publish(blobs, "echo", 1, to_bytes("evil"), nullptr), Error);
  fns.publish(blobs, "echo", 2, to_bytes("code v2"), nullptr);

  Rng rng(1);
  InvokeContext ctx{1000, &rng, LatencyRange{millis(8), millis(10)}, nullptr};
  auto inv = fns.invoke("echo", 1, Bytes{7}, ctx);
  EXPECT_EQ(inv.output, Bytes{7});
  EXPECT_EQ(inv.executed_digest, d);
  EXPECT_GE(inv.completes_at, 1000 + millis(8));
  EXPECT_LE(inv.completes_at, 1000 + millis(10));
  try {
    fns.invoke("nope", 1, Bytes{}, ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_function);
  }
}

TEST(FunctionRegistry, CrashedAccountFails) {
  BlobStore blobs("n1");
  FunctionRegistry fns("n1");
  fns.publish(blobs, "f", 1, to_bytes("x"), nullptr);
  FaultPlan plan;
  plan.node_crashes.push_back({"n1", 100, 200});
  InvokeContext ctx{150, nullptr, {}, &plan};
  try {
    fns.invoke("f", 1, Bytes{}, ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::crash_fault);
  }
  ctx.now = 200;  // windows are half-open
  EXPECT_NO_THROW(fns.invoke("f", 1, Bytes{}, ctx));
}

TEST(FaultPlan, Validation) {
  FaultPlan p;
  p.message_loss_rate = 1.5;
  EXPECT_THROW(p.validate(), Error);
  p.message_loss_rate = 0;
  p.node_crashes.push_back({"n0", 10, 5});
  EXPECT_THROW(p.validate(), Error);
}

TEST(FaultInjector, EmptyPlanLeavesRngUntouched) {
  FaultPlan plan;
  Rng a(9), b(9);
  FaultInjector inj(plan, a);
  Bytes m{1, 2, 3};
  EXPECT_EQ(inj.transmit(m), LinkOutcome::delivered);
  EXPECT_EQ(a.next(), b.next());
}

TEST(Seal, CorruptionIsDetected) {
  auto sealed = seal(to_bytes("payload"));
  ASSERT_TRUE(open(sealed).has_value());
  for (std::size_t bit = 0; bit < sealed.size() * 8; ++bit) {
    auto copy = sealed;
    copy[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    ASSERT_FALSE(open(copy).has_value()) << bit;
  }
}

TEST(EventTrace, OrdersByTimeThenInsertion) {
  EventTrace t;
  t.record(20, "b", "x");
  t.record(10, "a", "y", "d");
  t.record(20, "c", "z");
  EXPECT_EQ(t.str(), "10|a|y|d\n20|b|x|\n20|c|z|\n");
  EventTrace off(false);
  off.record(1, "a", "b");
  EXPECT_EQ(off.size(), 0u);
}

}  // namespace
