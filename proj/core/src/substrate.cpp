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

#include "sledger/substrate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sledger/error.hpp"

namespace sledger::substrate {

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) {
    throw Error(Errc::invalid_argument, "uniform_int: empty range");
  }
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) {
    return static_cast<std::int64_t>(engine_());
  }
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) {
    throw Error(Errc::invalid_argument, "exponential: rate must be positive");
  }
  return -std::log1p(-uniform01()) / rate;
}

bool Rng::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01() < p;
}

void SimClock::schedule_at(SimTime at, Action action) {
  if (at < now_) {
    throw Error(Errc::invalid_argument,
                fmt::format("cannot schedule at {} before now {}", at, now_));
  }
  events_.push(Event{at, next_seq_++, std::move(action)});
}

bool SimClock::step() {
  if (events_.empty()) return false;
  // priority_queue::top is const; the action is moved out via a copy of the
  // handle before popping.
  Event ev = events_.top();
  events_.pop();
  now_ = ev.at;
  ev.action();
  return true;
}

void SimClock::run_until(SimTime limit) {
  while (!events_.empty() && events_.top().at <= limit) {
    step();
  }
  if (limit > now_) now_ = limit;
}

void SimClock::advance_to(SimTime t) {
  if (!events_.empty() && events_.top().at < t) {
    throw Error(Errc::invalid_argument, "advance_to would skip pending events");
  }
  if (t > now_) now_ = t;
}

std::optional<SimTime> SimClock::next_event_time() const {
  if (events_.empty()) return std::nullopt;
  return events_.top().at;
}

SimDuration LatencyRange::draw(Rng& rng) const {
  if (max <= min) return min;
  return rng.uniform_int(min, max);
}

// ---------------------------------------------------------------------------

std::uint64_t DurableQueue::enqueue(Bytes payload, SimTime at) {
  if (payload.empty()) {
    throw Error(Errc::invalid_argument, "enqueue: empty payload");
  }
  const auto receipt = next_receipt_++;
  items_.emplace(receipt, QueueMessage{receipt, at, std::move(payload), at, 0});
  return receipt;
}

std::vector<QueueMessage> DurableQueue::receive_batch(std::size_t max, SimTime now,
                                                      SimDuration visibility) {
  std::vector<QueueMessage> out;
  for (auto& [receipt, msg] : items_) {
    if (out.size() >= max) break;
    if (msg.visible_at > now) continue;
    msg.visible_at = now + visibility;
    ++msg.deliveries;
    out.push_back(msg);
  }
  return out;
}

const QueueMessage& DurableQueue::receive(std::uint64_t receipt, SimTime now,
                                          SimDuration visibility) {
  auto it = items_.find(receipt);
  if (it == items_.end() || it->second.visible_at > now) {
    throw Error(Errc::not_found, fmt::format("message {} is not visible", receipt));
  }
  it->second.visible_at = now + visibility;
  ++it->second.deliveries;
  return it->second;
}

std::vector<const QueueMessage*> DurableQueue::peek_visible(SimTime now,
                                                            std::size_t limit) const {
  std::vector<const QueueMessage*> out;
  for (const auto& [receipt, msg] : items_) {
    if (out.size() >= limit) break;
    if (msg.visible_at <= now) out.push_back(&msg);
  }
  return out;
}

bool DurableQueue::ack(std::uint64_t receipt) {
  auto it = items_.find(receipt);
  if (it == items_.end()) return false;
  items_.erase(it);
  acked_.insert(receipt);
  return true;
}

std::size_t DurableQueue::visible_depth(SimTime now) const {
  return static_cast<std::size_t>(std::count_if(
      items_.begin(), items_.end(),
      [now](const auto& kv) { return kv.second.visible_at <= now; }));
}

std::optional<SimTime> DurableQueue::next_visible_after(SimTime now) const {
  std::optional<SimTime> best;
  for (const auto& [receipt, msg] : items_) {
    if (msg.visible_at > now && (!best || msg.visible_at < *best)) best = msg.visible_at;
  }
  return best;
}

// ---------------------------------------------------------------------------

std::uint64_t KVStore::write_conditional(std::string_view key, Bytes value,
                                         std::optional<std::uint64_t> expected_version) {
  auto it = entries_.find(key);
  const std::uint64_t current = it == entries_.end() ? 0 : it->second.version;
  if (expected_version && *expected_version != current) {
    throw Error(Errc::version_conflict,
                fmt::format("{}: version conflict on '{}' (expected {}, current {})",
                            owner_, key, *expected_version, current));
  }
  if (it == entries_.end()) {
    entries_.emplace(std::string(key), VersionedValue{std::move(value), 1});
    return 1;
  }
  it->second.value = std::move(value);
  return ++it->second.version;
}

const VersionedValue* KVStore::get(std::string_view key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::uint64_t KVStore::version(std::string_view key) const {
  const auto* v = get(key);
  return v ? v->version : 0;
}

bool KVStore::erase(std::string_view key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

std::vector<std::pair<std::string_view, const VersionedValue*>> KVStore::scan_prefix(
    std::string_view prefix) const {
  std::vector<std::pair<std::string_view, const VersionedValue*>> out;
  for (auto it = entries_.lower_bound(prefix);
       it != entries_.end() && std::string_view(it->first).starts_with(prefix); ++it) {
    out.emplace_back(it->first, &it->second);
  }
  return out;
}

bool KVStore::has_prefix(std::string_view prefix) const {
  auto it = entries_.lower_bound(prefix);
  return it != entries_.end() && std::string_view(it->first).starts_with(prefix);
}

// ---------------------------------------------------------------------------

Digest BlobStore::put(std::string_view key, Bytes bytes, bool embargo) {
  auto it = objects_.find(key);
  if (it != objects_.end() && it->second.embargoed) {
    throw Error(Errc::immutability_violation,
                fmt::format("{}: blob '{}' is embargoed", owner_, key));
  }
  auto digest = hash_content(bytes);
  BlobObject obj{std::move(bytes), embargo, digest};
  if (it == objects_.end()) {
    objects_.emplace(std::string(key), std::move(obj));
  } else {
    it->second = std::move(obj);
  }
  return digest;
}

const BlobObject& BlobStore::get(std::string_view key) const {
  const auto* obj = find(key);
  if (!obj) {
    throw Error(Errc::not_found, fmt::format("{}: no blob '{}'", owner_, key));
  }
  return *obj;
}

void BlobStore::remove(std::string_view key) {
  auto it = objects_.find(key);
  if (it == objects_.end()) {
    throw Error(Errc::not_found, fmt::format("{}: no blob '{}'", owner_, key));
  }
  if (it->second.embargoed) {
    throw Error(Errc::immutability_violation,
                fmt::format("{}: blob '{}' is embargoed", owner_, key));
  }
  objects_.erase(it);
}

const BlobObject* BlobStore::find(std::string_view key) const {
  auto it = objects_.find(key);
  return it == objects_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------

void FaultPlan::validate() const {
  auto check_rate = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(Errc::invalid_config, fmt::format("{} must lie in [0,1]", name));
    }
  };
  check_rate(message_loss_rate, "message_loss_rate");
  check_rate(message_corrupt_rate, "message_corrupt_rate");
  for (const auto& c : node_crashes) {
    if (c.node.empty() || c.crash_at < 0 || c.recover_at < c.crash_at) {
      throw Error(Errc::invalid_config,
                  fmt::format("invalid crash window for node '{}'", c.node));
    }
  }
}

bool FaultPlan::empty() const {
  return node_crashes.empty() && message_loss_rate == 0.0 &&
         message_corrupt_rate == 0.0 && !nefarious_orchestrator;
}

bool FaultPlan::is_crashed(std::string_view node, SimTime t) const {
  return std::any_of(node_crashes.begin(), node_crashes.end(), [&](const NodeCrash& c) {
    return c.node == node && t >= c.crash_at && t < c.recover_at;
  });
}

SimTime FaultPlan::last_recovery() const {
  SimTime last = 0;
  for (const auto& c : node_crashes) last = std::max(last, c.recover_at);
  return last;
}

LinkOutcome FaultInjector::transmit(Bytes& message) {
  if (plan_->message_loss_rate > 0.0 && rng_->bernoulli(plan_->message_loss_rate)) {
    return LinkOutcome::lost;
  }
  if (plan_->message_corrupt_rate > 0.0 && rng_->bernoulli(plan_->message_corrupt_rate)) {
    if (!message.empty()) {
      auto bit = rng_->uniform_int(0, static_cast<std::int64_t>(message.size()) * 8 - 1);
      message[static_cast<std::size_t>(bit / 8)] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    }
    return LinkOutcome::corrupted;
  }
  return LinkOutcome::delivered;
}

Bytes seal(ByteView payload) {
  Bytes out(payload.begin(), payload.end());
  auto d = hash_content(payload);
  out.insert(out.end(), d.bytes.begin(), d.bytes.end());
  return out;
}

std::optional<Bytes> open(ByteView sealed) {
  if (sealed.size() < 32) return std::nullopt;
  auto body = sealed.first(sealed.size() - 32);
  auto d = hash_content(body);
  if (!std::equal(d.bytes.begin(), d.bytes.end(), sealed.end() - 32)) {
    return std::nullopt;
  }
  return Bytes(body.begin(), body.end());
}

// ---------------------------------------------------------------------------

std::string FunctionRegistry::code_key(std::string_view name, std::uint32_t version) {
  return fmt::format("code/{}/{}", name, version);
}

Digest FunctionRegistry::publish(BlobStore& code_store, std::string_view name,
                                 std::uint32_t version, Bytes code, Handler handler) {
  if (contains(name, version)) {
    throw Error(Errc::immutability_violation,
                fmt::format("{}: function {}@{} already published", owner_, name, version));
  }
  auto digest = code_store.put(code_key(name, version), std::move(code), /*embargo=*/true);
  functions_.emplace(std::make_pair(std::string(name), version),
                     Entry{digest, std::move(handler)});
  return digest;
}

bool FunctionRegistry::contains(std::string_view name, std::uint32_t version) const {
  return functions_.find(std::make_pair(std::string(name), version)) != functions_.end();
}

Digest FunctionRegistry::digest(std::string_view name, std::uint32_t version) const {
  auto it = functions_.find(std::make_pair(std::string(name), version));
  if (it == functions_.end()) {
    throw Error(Errc::unknown_function,
                fmt::format("{}: unknown function {}@{}", owner_, name, version));
  }
  return it->second.digest;
}

Invocation FunctionRegistry::invoke(std::string_view name, std::uint32_t version,
                                    ByteView input, const InvokeContext& ctx) const {
  auto it = functions_.find(std::make_pair(std::string(name), version));
  if (it == functions_.end()) {
    throw Error(Errc::unknown_function,
                fmt::format("{}: unknown function {}@{}", owner_, name, version));
  }
  if (ctx.faults && ctx.faults->is_crashed(owner_, ctx.now)) {
    throw Error(Errc::crash_fault, fmt::format("{} is down at t={}", owner_, ctx.now));
  }
  const SimDuration latency = ctx.rng ? ctx.latency.draw(*ctx.rng) : ctx.latency.min;
  Invocation inv;
  inv.output = it->second.handler ? it->second.handler(input) : Bytes{};
  inv.executed_digest = it->second.digest;
  inv.completes_at = ctx.now + latency;
  return inv;
}

// ---------------------------------------------------------------------------

void EventTrace::record(SimTime at, std::string_view component, std::string_view event,
                        std::string details) {
  if (!enabled_) return;
  records_.push_back(
      Record{at, next_seq_++, fmt::format("{}|{}|{}|{}", at, component, event, details)});
}

std::string EventTrace::str() const {
  std::vector<const Record*> sorted;
  sorted.reserve(records_.size());
  for (const auto& r : records_) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const Record* a, const Record* b) {
    return a->at != b->at ? a->at < b->at : a->seq < b->seq;
  });
  std::string out;
  for (const auto* r : sorted) {
    out += r->line;
    out += '\n';
  }
  return out;
}

}  // namespace sledger::substrate
