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
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "sledger/access_control.hpp"
#include "sledger/error.hpp"
#include "sledger/simulation.hpp"

namespace sledger::sim {
namespace {

using ojson = nlohmann::ordered_json;

void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::invalid_argument, fmt::format("cannot write '{}'", path.string()));
}

}  // namespace

Percentiles percentiles(std::vector<double> samples) {
  if (samples.empty()) return {};
  std::sort(samples.begin(), samples.end());
  auto rank = [&](double q) {
    auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
    return samples[std::clamp<std::size_t>(k, 1, samples.size()) - 1];
  };
  return {rank(0.50), rank(0.95), rank(0.99)};
}

bool RunReport::ok() const {
  return std::all_of(invariants.begin(), invariants.end(),
                     [](const InvariantCheck& c) { return c.ok; });
}

std::string RunReport::to_json() const {
  ojson j;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["transactions"] = {{"submitted", submitted}, {"committed", committed},
                       {"aborted", aborted},     {"rejected", rejected},
                       {"unfinished", unfinished}};
  j["blocks"] = {{"rounds", rounds},
                 {"committed", blocks_committed},
                 {"aborted", blocks_aborted},
                 {"remints", remints},
                 {"resyncs", resyncs},
                 {"mean_batch_size", mean_batch_size}};
  j["simulated_s"] = simulated_s;
  j["throughput_tps"] = throughput_tps;
  j["latency_ms"] = {{"p50", latency_ms.p50}, {"p95", latency_ms.p95}, {"p99", latency_ms.p99}};
  j["billing"] = {{"gateway_invocations", meter.gateway_invocations},
                  {"consensus_invocations", meter.consensus_invocations},
                  {"queue_ops", meter.queue_ops},
                  {"kv_writes", meter.kv_writes},
                  {"unit_prices", ojson::parse(cost::unit_prices_to_json(prices))},
                  {"total_usd", billing_total_usd},
                  {"per_tx_usd", billing_per_tx_usd},
                  {"analytic_per_tx_usd", analytic_per_tx_usd}};
  ojson nodes_json = ojson::array();
  for (const auto& n : nodes) {
    nodes_json.push_back({{"id", n.id},
                          {"status", n.status},
                          {"height", n.height},
                          {"state_digest", n.state_digest}});
  }
  j["nodes"] = std::move(nodes_json);
  ojson chain = {{"ok", chain_ok}, {"audit_state_digest", audit_digest}};
  if (chain_first_invalid) {
    chain["first_invalid"] = *chain_first_invalid;
    chain["reason"] = chain_reason;
  }
  j["chain_verify"] = std::move(chain);
  j["adversary"] = {
      {"attacks", attacks}, {"detections", detections}, {"forged_commits", forged_commits}};
  ojson inv = ojson::array();
  for (const auto& c : invariants) {
    ojson item = {{"name", c.name}, {"ok", c.ok}};
    if (!c.detail.empty()) item["detail"] = c.detail;
    inv.push_back(std::move(item));
  }
  j["invariants"] = std::move(inv);
  j["ok"] = ok();
  return j.dump(2) + "\n";
}

void RunArtifacts::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", report.to_json());
  write_file(dir / "ledger.bin",
             std::string_view(reinterpret_cast<const char*>(ledger_export.data()),
                              ledger_export.size()));
  write_file(dir / "chain_config.json", chain_config_json);
  write_file(dir / "trace.log", trace);
  write_file(dir / "blocks.csv", blocks_csv);
}

// ---------------------------------------------------------------------------

Simulation::Simulation(Scenario scenario) : scenario_(std::move(scenario)) {
  scenario_.validate();
  spec_ = std::make_shared<const schema::CompiledChainSpec>(
      schema::compile_schema_json(scenario_.schema_json));

  auto members = consensus::make_membership(scenario_.nodes, scenario_.clients, scenario_.seed);
  auto& config = members.config;
  config.policy = scenario_.policy;
  config.max_block_size = scenario_.max_block_size;
  config.leader_mode = scenario_.leader_mode;
  config.dedicated_leader = scenario_.dedicated_leader;
  config.default_latency_bound_ms = scenario_.default_latency_bound_ms;

  consensus::NetworkOptions options;
  options.seed = scenario_.seed;
  options.faults = scenario_.faults;
  options.latency = scenario_.latency;
  options.node_options.apply_threads = scenario_.apply_threads;
  options.trace = scenario_.trace;
  network_ = consensus::provision_network(*spec_, std::move(config), std::move(members.keys),
                                          std::move(options));
}

Simulation::~Simulation() = default;

void Simulation::run() {
  if (ran_) throw Error(Errc::invalid_argument, "simulation already ran");
  ran_ = true;
  submitted_ = schedule_workload();
  auto& net = *network_;
  const auto limit = last_arrival_ + substrate::seconds_f(scenario_.drain_s);
  net.run(limit);
  // Crashed nodes rejoin only once their window closes.
  net.settle(std::max(net.clock().now(), scenario_.faults.last_recovery()));
}

RunArtifacts Simulation::artifacts() const {
  const auto& net = *network_;
  const auto& ref = net.reference_node();
  const auto chain = ref.chain();
  const auto& config = net.config();

  RunArtifacts out;
  auto& r = out.report;
  r.scenario = scenario_.name;
  r.seed = scenario_.seed;
  r.submitted = submitted_;

  std::vector<double> latencies;
  substrate::SimTime last_commit = 0;
  std::uint64_t recorded = 0;
  for (const auto& [id, rec] : net.entries()) {
    ++recorded;
    switch (rec.status) {
      case consensus::EntryStatus::committed:
        ++r.committed;
        latencies.push_back(substrate::to_millis(rec.finished_at - rec.submitted_at));
        last_commit = std::max(last_commit, rec.finished_at);
        break;
      case consensus::EntryStatus::aborted: ++r.aborted; break;
      case consensus::EntryStatus::rejected: ++r.rejected; break;
      case consensus::EntryStatus::in_flight: ++r.unfinished; break;
    }
  }
  if (recorded < r.submitted) r.unfinished += r.submitted - recorded;

  // Steady-state window: drop the first and last 5 % of the active span.
  if (last_commit > 0) {
    const double span = substrate::to_seconds(last_commit);
    const double lo = 0.05 * span, hi = 0.95 * span;
    std::uint64_t inside = 0;
    for (const auto& [id, rec] : net.entries()) {
      if (rec.status != consensus::EntryStatus::committed) continue;
      const double t = substrate::to_seconds(rec.finished_at);
      if (t >= lo && t <= hi) ++inside;
    }
    r.throughput_tps = hi > lo ? static_cast<double>(inside) / (hi - lo) : 0;
  }
  r.latency_ms = percentiles(std::move(latencies));
  r.simulated_s = substrate::to_seconds(net.clock().now());

  const auto& stats = net.stats();
  r.rounds = stats.rounds;
  r.blocks_committed = stats.blocks_committed;
  r.blocks_aborted = stats.blocks_aborted;
  r.remints = stats.remints;
  r.resyncs = stats.resyncs;
  r.attacks = stats.attacks;
  r.detections = stats.detections;
  if (!stats.batch_sizes.empty()) {
    r.mean_batch_size =
        std::accumulate(stats.batch_sizes.begin(), stats.batch_sizes.end(), 0.0) /
        static_cast<double>(stats.batch_sizes.size());
  }

  const auto model = cost::calibrate_serverless();
  r.prices = scenario_.unit_prices
                 ? *scenario_.unit_prices
                 : cost::calibrate_unit_prices(model, net.node_count(), mean_writes_);
  r.meter = net.meter();
  r.billing_total_usd = r.meter.total(r.prices);
  if (r.committed > 0) r.billing_per_tx_usd = r.billing_total_usd / static_cast<double>(r.committed);
  if (r.mean_batch_size >= 1) {
    r.analytic_per_tx_usd = cost::per_tx_cost_serverless(
        model, std::min<double>(r.mean_batch_size, model.max_block_size));
  }

  std::set<std::string> digests;
  std::set<std::uint64_t> heights;
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    const auto& n = net.node(i);
    const auto status = net.status(i);
    auto digest = n.state_digest().hex();
    r.nodes.push_back({n.id(), std::string(consensus::node_status_name(status)), n.height(), digest});
    if (status != consensus::NodeStatus::crashed) {
      digests.insert(digest);
      heights.insert(n.height());
    }
    for (const auto& b : n.chain()) {
      if (b.status == ledger::BlockStatus::committed && net.forged_block_ids().contains(b.block_id)) {
        ++r.forged_commits;
      }
    }
  }

  const auto report = integrity::chain_verify(config, chain);
  r.chain_ok = report.ok;
  r.chain_first_invalid = report.first_invalid;
  r.chain_reason = report.reason;

  std::string audit_detail;
  bool audit_ok = false;
  try {
    auto snapshot = integrity::audit_state_at(config, chain, ref.height());
    r.audit_digest = snapshot.digest.hex();
    audit_ok = snapshot.digest == ref.state_digest();
    if (!audit_ok) audit_detail = "replayed state differs from the reference node";
  } catch (const Error& e) {
    audit_detail = e.what();
  }

  std::set<std::string> seen;
  std::string duplicate;
  for (const auto& b : chain) {
    if (b.status != ledger::BlockStatus::committed) continue;
    for (const auto& e : b.entries) {
      if (e.transaction() && !seen.insert(e.id()).second && duplicate.empty()) duplicate = e.id();
    }
  }

  auto& inv = r.invariants;
  inv.push_back({"conservation", r.unfinished == 0 &&
                                     r.committed + r.aborted + r.rejected == r.submitted,
                 r.unfinished == 0 ? "" : fmt::format("{} transactions unfinished", r.unfinished)});
  inv.push_back({"convergence", digests.size() <= 1 && heights.size() <= 1,
                 digests.size() <= 1 ? "" : fmt::format("{} distinct live digests", digests.size())});
  inv.push_back({"chain_verify", r.chain_ok, r.chain_reason});
  inv.push_back({"audit_replay", audit_ok, audit_detail});
  const bool acl_ok = acl::materialize(chain) == ref.acl();
  inv.push_back({"acl_rebuild", acl_ok, acl_ok ? "" : "ledger-derived ACL state differs"});
  inv.push_back({"exactly_once", duplicate.empty(),
                 duplicate.empty() ? "" : fmt::format("{} committed twice", duplicate)});
  inv.push_back({"no_forged_commits", r.forged_commits == 0,
                 r.forged_commits == 0 ? "" : fmt::format("{} forged blocks committed", r.forged_commits)});

  out.ledger_export = integrity::export_ledger(chain);
  out.chain_config_json = ledger::chain_config_to_json(config);
  out.trace = net.trace().str();
  std::string csv = "height,block_id,status,entries,lanes,content_hash\n";
  for (const auto& b : chain) {
    csv += fmt::format("{},{},{},{},{},{}\n", b.height, b.block_id,
                       ledger::block_status_name(b.status), b.entries.size(), b.schedule.size(),
                       b.content_hash.hex());
  }
  out.blocks_csv = std::move(csv);
  return out;
}

RunArtifacts run_scenario(const Scenario& scenario) {
  Simulation sim(scenario);
  sim.run();
  return sim.artifacts();
}

// ---------------------------------------------------------------------------

std::string CostSweep::csv() const {
  std::istringstream in(curve.csv());
  std::string line, out;
  std::size_t row = 0;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      out += line + ",measured_usd_per_tx\n";
      header = false;
      continue;
    }
    std::string cell;
    const double tps = curve.rows.at(row++).tps;
    for (const auto& m : measured) {
      if (m.tps == tps) cell = fmt::format("{:.9g}", m.measured_usd_per_tx);
    }
    out += line + "," + cell + "\n";
  }
  return out;
}

CostSweep cost_sweep(const Scenario& scenario, std::span<const double> grid, std::size_t max_txs) {
  if (grid.empty()) throw Error(Errc::invalid_argument, "empty throughput grid");
  CostSweep sweep;
  const auto serverful =
      scenario.serverful.empty() ? cost::default_serverful_configs() : scenario.serverful;
  const double bound_ms =
      scenario.workload.latency_bound_ms.value_or(scenario.default_latency_bound_ms);
  sweep.curve =
      cost::generate_cost_curve(cost::calibrate_serverless(), serverful, grid, bound_ms / 1000.0);

  std::set<std::size_t> picks = {0, grid.size() / 2, grid.size() - 1};
  for (auto i : picks) {
    Scenario s = scenario;
    s.trace = false;
    s.workload.rate_tps = grid[i];
    // Enough arrivals for several batches, but bounded for high rates.
    const double cap = static_cast<double>(max_txs) / grid[i];
    s.workload.duration_s = std::max(std::min(s.workload.duration_s, cap), 20.0 / grid[i]);
    auto run = run_scenario(s);
    sweep.measured.push_back(
        {grid[i], run.report.billing_per_tx_usd, run.report.mean_batch_size});
  }
  return sweep;
}

}  // namespace sledger::sim
