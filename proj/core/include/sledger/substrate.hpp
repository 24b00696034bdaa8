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

// In-process stand-ins for the serverless primitives the ledger runs on:
// a discrete-event clock, a durable at-least-once queue, a versioned KV
// store, an embargo-capable blob store, a versioned function registry and
// a fault plan. Everything is single-threaded and deterministic given the
// scenario seed.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sledger/crypto.hpp"
#include "sledger/encoding.hpp"

namespace sledger::substrate {

// Simulated time in microseconds.
using SimTime = std::int64_t;
using SimDuration = std::int64_t;

constexpr SimDuration micros(std::int64_t v) { return v; }
constexpr SimDuration millis(std::int64_t v) { return v * 1000; }
constexpr SimDuration seconds(std::int64_t v) { return v * 1'000'000; }
inline SimDuration seconds_f(double v) {
  return static_cast<SimDuration>(v * 1e6 + (v >= 0 ? 0.5 : -0.5));
}
inline double to_seconds(SimDuration d) { return static_cast<double>(d) / 1e6; }
inline double to_millis(SimDuration d) { return static_cast<double>(d) / 1e3; }

// mt19937_64 has a standard-mandated output sequence; the distributions
// below are written out by hand so results do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01();                                   // [0, 1)
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);  // [lo, hi]
  double exponential(double rate);
  bool bernoulli(double p);

 private:
  std::mt19937_64 engine_;
};

class SimClock {
 public:
  using Action = std::function<void()>;

  explicit SimClock(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  SimTime now() const { return now_; }
  std::uint64_t seed() const { return seed_; }
  Rng& rng() { return rng_; }

  void schedule_at(SimTime at, Action action);
  void schedule_after(SimDuration delay, Action action) {
    schedule_at(now_ + delay, std::move(action));
  }

  // Runs the earliest pending event. Returns false when none is left.
  bool step();
  // Runs every event with time <= limit, then leaves now() at limit.
  void run_until(SimTime limit);
  // Moves time forward without running anything; fails if events would be
  // skipped.
  void advance_to(SimTime t);

  std::size_t pending() const { return events_.size(); }
  std::optional<SimTime> next_event_time() const;

 private:
  struct Event {
    SimTime at;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  std::uint64_t seed_;
  Rng rng_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> events_;
};

struct LatencyRange {
  SimDuration min = millis(8);
  SimDuration max = millis(10);

  SimDuration draw(Rng& rng) const;
};

// ---------------------------------------------------------------------------

struct QueueMessage {
  std::uint64_t receipt = 0;
  SimTime enqueued_at = 0;
  Bytes payload;
  SimTime visible_at = 0;
  std::uint32_t deliveries = 0;
};

// FIFO queue with at-least-once delivery. A received but unacknowledged
// message becomes visible again once its visibility timeout lapses.
class DurableQueue {
 public:
  explicit DurableQueue(std::string owner) : owner_(std::move(owner)) {}

  const std::string& owner() const { return owner_; }

  std::uint64_t enqueue(Bytes payload, SimTime at);

  std::vector<QueueMessage> receive_batch(std::size_t max, SimTime now,
                                          SimDuration visibility);
  // Receives one specific visible message.
  const QueueMessage& receive(std::uint64_t receipt, SimTime now,
                              SimDuration visibility);
  // Visible messages in FIFO order without delivering them.
  std::vector<const QueueMessage*> peek_visible(SimTime now,
                                                std::size_t limit) const;

  // Returns false if the receipt is unknown or was already acknowledged.
  bool ack(std::uint64_t receipt);
  bool acked(std::uint64_t receipt) const { return acked_.contains(receipt); }

  std::size_t depth() const { return items_.size(); }
  std::size_t visible_depth(SimTime now) const;
  // Earliest time an in-flight message becomes visible again.
  std::optional<SimTime> next_visible_after(SimTime now) const;
  std::uint64_t total_enqueued() const { return next_receipt_ - 1; }

 private:
  std::string owner_;
  std::uint64_t next_receipt_ = 1;
  std::map<std::uint64_t, QueueMessage> items_;
  std::set<std::uint64_t> acked_;
};

// ---------------------------------------------------------------------------

struct VersionedValue {
  Bytes value;
  std::uint64_t version = 0;

  bool operator==(const VersionedValue&) const = default;
};

class KVStore {
 public:
  using Map = std::map<std::string, VersionedValue, std::less<>>;

  explicit KVStore(std::string owner = {}) : owner_(std::move(owner)) {}

  const std::string& owner() const { return owner_; }

  // expected_version: nullopt writes unconditionally, 0 requires the key to
  // be absent, k > 0 requires the current version to be k. Throws
  // Errc::version_conflict without mutating anything on mismatch.
  std::uint64_t write_conditional(std::string_view key, Bytes value,
                                  std::optional<std::uint64_t> expected_version);

  const VersionedValue* get(std::string_view key) const;
  std::uint64_t version(std::string_view key) const;
  bool erase(std::string_view key);

  // Entries whose key starts with prefix, in key order.
  std::vector<std::pair<std::string_view, const VersionedValue*>> scan_prefix(
      std::string_view prefix) const;
  bool has_prefix(std::string_view prefix) const;

  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  bool operator==(const KVStore& other) const { return entries_ == other.entries_; }

 private:
  std::string owner_;
  Map entries_;
};

// ---------------------------------------------------------------------------

struct BlobObject {
  Bytes bytes;
  bool embargoed = false;
  Digest digest;
};

// Read-only view over blob storage; audits take this so they can be pointed
// at exported or deliberately hostile stores.
class BlobSource {
 public:
  virtual ~BlobSource() = default;
  virtual const BlobObject* find(std::string_view key) const = 0;
};

class BlobStore : public BlobSource {
 public:
  explicit BlobStore(std::string owner = {}) : owner_(std::move(owner)) {}

  // Throws Errc::immutability_violation if key is embargoed, for every
  // caller including the owner.
  Digest put(std::string_view key, Bytes bytes, bool embargo);
  const BlobObject& get(std::string_view key) const;
  void remove(std::string_view key);

  const BlobObject* find(std::string_view key) const override;
  const std::map<std::string, BlobObject, std::less<>>& objects() const {
    return objects_;
  }

 private:
  std::string owner_;
  std::map<std::string, BlobObject, std::less<>> objects_;
};

// ---------------------------------------------------------------------------

struct NodeCrash {
  std::string node;
  SimTime crash_at = 0;
  SimTime recover_at = 0;
};

struct FaultPlan {
  std::vector<NodeCrash> node_crashes;
  double message_loss_rate = 0.0;
  double message_corrupt_rate = 0.0;
  bool nefarious_orchestrator = false;

  void validate() const;
  bool empty() const;
  // Crash windows are half-open: [crash_at, recover_at).
  bool is_crashed(std::string_view node, SimTime t) const;
  SimTime last_recovery() const;
};

enum class LinkOutcome { delivered, lost, corrupted };

// Applies the plan's loss/corruption rates to one message. The RNG is only
// consulted for non-zero rates, so an empty plan leaves the random stream
// untouched.
class FaultInjector {
 public:
  FaultInjector(const FaultPlan& plan, Rng& rng) : plan_(&plan), rng_(&rng) {}

  const FaultPlan& plan() const { return *plan_; }
  LinkOutcome transmit(Bytes& message);

 private:
  const FaultPlan* plan_;
  Rng* rng_;
};

// Every protocol message travels sealed with its digest; corruption shows up
// as a failed open() at the receiver.
Bytes seal(ByteView payload);
std::optional<Bytes> open(ByteView sealed);

// ---------------------------------------------------------------------------

using Handler = std::function<Bytes(ByteView)>;

struct Invocation {
  Bytes output;
  Digest executed_digest;
  SimTime completes_at = 0;
};

struct InvokeContext {
  SimTime now = 0;
  Rng* rng = nullptr;
  LatencyRange latency;
  const FaultPlan* faults = nullptr;
};

// Published (name, version) pairs are frozen: their code is stored embargoed
// in the owning account's blob store and their digest never changes.
class FunctionRegistry {
 public:
  explicit FunctionRegistry(std::string owner = {}) : owner_(std::move(owner)) {}

  static std::string code_key(std::string_view name, std::uint32_t version);

  Digest publish(BlobStore& code_store, std::string_view name,
                 std::uint32_t version, Bytes code, Handler handler);
  bool contains(std::string_view name, std::uint32_t version) const;
  Digest digest(std::string_view name, std::uint32_t version) const;

  // Throws Errc::unknown_function or Errc::crash_fault.
  Invocation invoke(std::string_view name, std::uint32_t version, ByteView input,
                    const InvokeContext& ctx) const;

 private:
  struct Entry {
    Digest digest;
    Handler handler;
  };
  std::string owner_;
  std::map<std::pair<std::string, std::uint32_t>, Entry, std::less<>> functions_;
};

// ---------------------------------------------------------------------------

// `time|component|event|details`, ordered by (time, insertion).
class EventTrace {
 public:
  explicit EventTrace(bool enabled = true) : enabled_(enabled) {}

  void record(SimTime at, std::string_view component, std::string_view event,
              std::string details = {});
  std::string str() const;
  std::size_t size() const { return records_.size(); }
  bool enabled() const { return enabled_; }

 private:
  struct Record {
    SimTime at;
    std::uint64_t seq;
    std::string line;
  };
  bool enabled_;
  std::uint64_t next_seq_ = 0;
  std::vector<Record> records_;
};

// One participant's isolated bundle of resources.
struct NodeAccount {
  explicit NodeAccount(const std::string& account_id)
      : id(account_id), kv(account_id), blobs(account_id), functions(account_id) {}

  std::string id;
  KVStore kv;
  BlobStore blobs;
  FunctionRegistry functions;
};

}  // namespace sledger::substrate
