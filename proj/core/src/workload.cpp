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
#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sledger/error.hpp"
#include "sledger/simulation.hpp"
#include "sledger/world_state.hpp"

namespace sledger::sim {
namespace {

using substrate::Rng;

constexpr std::uint64_t kWorkloadStream = 0x9e3779b97f4a7c15ULL;

std::uint64_t workload_seed(std::uint64_t seed) { return seed * kWorkloadStream + 0x5151; }

Value random_value(const schema::FieldSpec& spec, Rng& rng) {
  const auto& c = spec.constraints;
  auto length = [&](std::uint32_t preferred) {
    std::uint32_t lo = c.min_length.value_or(0);
    std::uint32_t hi = std::max(lo, c.max_length.value_or(preferred * 8));
    return std::clamp(preferred, lo, hi);
  };
  switch (spec.type) {
    case ValueType::string: {
      static constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
      std::string s(length(8), 'a');
      for (auto& ch : s) {
        ch = kAlphabet[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(kAlphabet.size()) - 1))];
      }
      return Value::string(std::move(s));
    }
    case ValueType::integer: {
      auto lo = static_cast<std::int64_t>(std::ceil(c.minimum.value_or(0)));
      auto hi = static_cast<std::int64_t>(std::floor(c.maximum.value_or(1e6)));
      if (hi < lo) hi = lo;
      return Value::integer(rng.uniform_int(lo, hi));
    }
    case ValueType::decimal: {
      double lo = c.minimum.value_or(0), hi = c.maximum.value_or(1e6);
      if (hi < lo) hi = lo;
      return Value::decimal(lo + rng.uniform01() * (hi - lo));
    }
    case ValueType::boolean:
      return Value::boolean(rng.bernoulli(0.5));
    case ValueType::bytes: {
      Bytes b(length(8));
      for (auto& x : b) x = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
      return Value::bytes(std::move(b));
    }
    case ValueType::reference:
      break;
  }
  throw Error(Errc::invalid_config, "workload cannot generate reference values");
}

struct Planned {
  std::string submitter;
  std::vector<ledger::WriteOp> writes;
  std::optional<std::string> read_key;
  ledger::AtomicGroup group;
};

}  // namespace

std::vector<double> arrival_times(const WorkloadSpec& w, std::uint64_t seed) {
  w.validate();
  std::vector<double> out;
  switch (w.shape) {
    case Shape::constant: {
      const auto n = static_cast<std::size_t>(std::llround(w.rate_tps * w.duration_s));
      out.reserve(n);
      for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<double>(i) / w.rate_tps);
      break;
    }
    case Shape::poisson: {
      Rng rng(workload_seed(seed) ^ 0xa11);
      for (double t = rng.exponential(w.rate_tps); t < w.duration_s;
           t += rng.exponential(w.rate_tps)) {
        out.push_back(t);
      }
      break;
    }
    case Shape::burst: {
      const auto per_burst =
          std::max<std::int64_t>(1, std::llround(w.rate_tps * w.burst_period_s));
      for (double t = 0; t < w.duration_s - 1e-9; t += w.burst_period_s) {
        out.insert(out.end(), static_cast<std::size_t>(per_burst), t);
      }
      break;
    }
  }
  return out;
}

std::size_t Simulation::schedule_workload() {
  const auto& w = scenario_.workload;
  auto& net = *network_;
  const auto& spec = *spec_;

  std::string table = w.table;
  if (table.empty()) {
    auto tables = spec.tables();
    if (tables.empty()) throw Error(Errc::invalid_config, "schema defines no tables");
    table = tables.front();
  }
  if (!spec.has_table(table)) {
    throw Error(Errc::invalid_config, fmt::format("workload table '{}' is not in the schema", table));
  }

  std::vector<std::string> required, optional;
  for (const auto& name : spec.table_fields(table)) {
    const auto* f = spec.find(table + "." + name);
    const bool generatable = f->type != ValueType::reference && !f->constraints.pattern;
    if (f->required && !generatable) {
      throw Error(Errc::invalid_config,
                  fmt::format("workload cannot fill required field {}.{}", table, name));
    }
    if (!generatable) continue;
    (f->required ? required : optional).push_back(name);
  }
  if (required.size() + optional.size() < w.payload_fields) {
    throw Error(Errc::invalid_config,
                fmt::format("table '{}' has only {} generatable fields, workload wants {}", table,
                            required.size() + optional.size(), w.payload_fields));
  }

  // Submitters must be able to write every field they might touch.
  std::vector<std::string> candidates = w.submitters;
  if (candidates.empty()) {
    for (const auto& m : net.config().clients) candidates.push_back(m.id);
  }
  if (candidates.empty()) {
    for (const auto& m : net.config().nodes) candidates.push_back(m.id);
  }
  const auto& acl = net.node(0).acl();
  std::vector<std::string> submitters;
  for (const auto& p : candidates) {
    if (net.config().principal_key(p) == nullptr) {
      throw Error(Errc::invalid_config, fmt::format("submitter '{}' is not a member", p));
    }
    bool ok = true;
    for (const auto* list : {&required, &optional}) {
      for (const auto& f : *list) {
        ok = ok && acl.allows(p, table + "." + f, ledger::AclMode::write);
      }
    }
    if (ok) submitters.push_back(p);
  }
  if (submitters.empty()) {
    throw Error(Errc::invalid_config, fmt::format("no submitter may write table '{}'", table));
  }

  Rng rng(workload_seed(scenario_.seed));
  const auto times = arrival_times(w, scenario_.seed);
  std::uint64_t group_seq = 0;
  std::size_t group_left = 0;
  ledger::AtomicGroup group;
  substrate::SimTime group_at = 0;
  std::size_t writes = 0;

  for (std::size_t i = 0; i < times.size(); ++i) {
    Planned p;
    p.submitter = submitters[i % submitters.size()];
    const auto row = fmt::format("r{}", rng.uniform_int(0, w.key_space - 1));

    auto fields = required;
    auto pool = optional;
    while (fields.size() < w.payload_fields) {
      auto k = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1));
      fields.push_back(pool[k]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
    std::sort(fields.begin(), fields.end());
    for (const auto& f : fields) {
      p.writes.push_back(
          {FieldKey{table, row, f}, random_value(*spec.find(table + "." + f), rng)});
    }
    writes += p.writes.size();

    if (w.read_fraction > 0 && rng.bernoulli(w.read_fraction)) {
      const auto other = fmt::format("r{}", rng.uniform_int(0, w.key_space - 1));
      p.read_key = FieldKey{table, other, fields.front()}.state_key();
    }

    auto at = substrate::seconds_f(times[i]);
    if (group_left == 0 && w.group_fraction > 0 && i + w.group_size <= times.size() &&
        rng.bernoulli(w.group_fraction)) {
      group = ledger::AtomicGroup{
          fmt::format("g-{:05}", group_seq++),
          w.ordered_groups ? ledger::GroupMode::ordered : ledger::GroupMode::unordered,
          w.group_size, 0};
      group_left = w.group_size;
      group_at = at;
    }
    if (group_left > 0) {
      p.group = group;
      p.group.index = group.size - static_cast<std::uint32_t>(group_left);
      at = group_at;  // members travel together
      --group_left;
    }

    last_arrival_ = std::max(last_arrival_, at);
    auto tx_id = fmt::format("tx-{:06}", i);
    auto bound = w.latency_bound_ms;
    net.submit_at(at, [&net, tx_id = std::move(tx_id), bound, p = std::move(p)] {
      ledger::Transaction tx;
      tx.tx_id = tx_id;
      tx.submitter = p.submitter;
      tx.writes = p.writes;
      tx.group = p.group;
      tx.latency_bound_ms = bound;
      // The client builds against the head it can see right now.
      const auto& ref = net.reference_node();
      tx.schema_digest = ref.schema().digest();
      if (p.read_key) {
        auto version = ref.account().kv.version(std::string(consensus::kStatePrefix) + *p.read_key);
        tx.reads.push_back({*p.read_key, version});
      }
      ledger::sign_transaction(tx, net.keys().keys(p.submitter));
      return ledger::LedgerEntry{std::move(tx)};
    });
  }
  mean_writes_ = times.empty() ? 1.0 : static_cast<double>(writes) / static_cast<double>(times.size());
  return times.size();
}

}  // namespace sledger::sim
