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
// Scenario files, workload generation and end-to-end simulation runs with
// their reports and artifacts.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sledger/costmodel.hpp"
#include "sledger/integrity.hpp"
#include "sledger/ledger_model.hpp"
#include "sledger/network.hpp"
#include "sledger/schema.hpp"
#include "sledger/substrate.hpp"

namespace sledger::sim {

enum class Shape { constant, poisson, burst };
std::string_view shape_name(Shape shape);

struct WorkloadSpec {
  Shape shape = Shape::constant;
  double rate_tps = 100;
  double duration_s = 10;
  std::uint32_t payload_fields = 1;
  // Rows are drawn uniformly from key_space; smaller spaces mean denser
  // conflicts.
  std::uint32_t key_space = 1000;
  double read_fraction = 0;
  std::optional<std::uint32_t> latency_bound_ms;
  double group_fraction = 0;
  std::uint32_t group_size = 2;
  bool ordered_groups = true;
  double burst_period_s = 1;
  std::string table;  // first table of the schema when empty
  std::vector<std::string> submitters;  // clients (else nodes) when empty

  void validate() const;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  std::string schema_json;
  std::vector<std::string> nodes;
  std::vector<std::string> clients;
  ledger::PolicyMode policy = ledger::PolicyMode::majority;
  std::uint32_t max_block_size = 900;
  ledger::LeaderMode leader_mode = ledger::LeaderMode::rotating;
  std::string dedicated_leader;
  std::uint32_t default_latency_bound_ms = 1000;
  consensus::LatencyConfig latency;
  substrate::FaultPlan faults;
  WorkloadSpec workload;
  std::optional<cost::UnitPrices> unit_prices;  // calibrated when absent
  std::vector<cost::ServerfulCostParams> serverful;  // defaults when empty
  std::size_t apply_threads = 1;
  // Extra simulated time after the last submission for in-flight work.
  double drain_s = 30;
  std::string output_dir;
  bool trace = true;

  // Throws Errc::invalid_config.
  void validate() const;
};

// Built-in single-table schema ("kv") with `fields` string fields f0..fN-1,
// readable and writable by everyone.
std::string default_schema_json(std::uint32_t fields);

// Throws Errc::parse_error naming the line/column or the offending key.
// Relative file references resolve against base_dir.
Scenario parse_scenario(std::string_view json_text,
                        const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& file);

// Arrival offsets (seconds from t=0) for a workload; drawn from its own
// stream so changing protocol parameters does not move arrivals.
std::vector<double> arrival_times(const WorkloadSpec& workload, std::uint64_t seed);

// ---------------------------------------------------------------------------

struct Percentiles {
  double p50 = 0;
  double p95 = 0;
  double p99 = 0;
};

// Nearest-rank percentiles; zeros for an empty sample.
Percentiles percentiles(std::vector<double> samples);

struct InvariantCheck {
  std::string name;
  bool ok = true;
  std::string detail;
};

struct NodeSummary {
  std::string id;
  std::string status;
  std::uint64_t height = 0;
  std::string state_digest;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::uint64_t submitted = 0;
  std::uint64_t committed = 0;
  std::uint64_t aborted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t unfinished = 0;
  std::uint64_t rounds = 0;
  std::uint64_t blocks_committed = 0;
  std::uint64_t blocks_aborted = 0;
  std::uint64_t remints = 0;
  std::uint64_t resyncs = 0;
  double simulated_s = 0;
  double throughput_tps = 0;
  Percentiles latency_ms;
  double mean_batch_size = 0;
  cost::BillingMeter meter;
  cost::UnitPrices prices;
  double billing_total_usd = 0;
  double billing_per_tx_usd = 0;
  double analytic_per_tx_usd = 0;  // cost(n̄) under the calibrated model
  std::vector<NodeSummary> nodes;
  bool chain_ok = false;
  std::optional<std::uint64_t> chain_first_invalid;
  std::string chain_reason;
  std::string audit_digest;
  std::uint64_t attacks = 0;
  std::uint64_t detections = 0;
  std::uint64_t forged_commits = 0;
  std::vector<InvariantCheck> invariants;

  bool ok() const;
  std::string to_json() const;
};

struct RunArtifacts {
  RunReport report;
  Bytes ledger_export;
  std::string chain_config_json;
  std::string trace;
  std::string blocks_csv;

  // report.json, ledger.bin, chain_config.json, trace.log, blocks.csv
  void write(const std::filesystem::path& dir) const;
};

class Simulation {
 public:
  // Compiles the schema and provisions the network. Throws SchemaError or
  // Errc::invalid_config.
  explicit Simulation(Scenario scenario);
  ~Simulation();

  const Scenario& scenario() const { return scenario_; }
  consensus::Network& network() { return *network_; }
  const schema::CompiledChainSpec& spec() const { return *spec_; }

  // Schedules the workload, runs to drain, resyncs lagging nodes.
  void run();
  RunArtifacts artifacts() const;

 private:
  std::size_t schedule_workload();

  Scenario scenario_;
  std::shared_ptr<const schema::CompiledChainSpec> spec_;
  std::unique_ptr<consensus::Network> network_;
  std::size_t submitted_ = 0;
  double mean_writes_ = 1;
  substrate::SimTime last_arrival_ = 0;
  bool ran_ = false;
};

RunArtifacts run_scenario(const Scenario& scenario);

// ---------------------------------------------------------------------------

struct SweepPoint {
  double tps = 0;
  double measured_usd_per_tx = 0;
  double mean_batch_size = 0;
};

struct CostSweep {
  cost::CostCurve curve;
  std::vector<SweepPoint> measured;

  // The analytic curve plus a measured_usd_per_tx column (empty where no
  // simulation was run).
  std::string csv() const;
};

// Analytic curve over the grid, plus simulated billing at three grid points
// (lowest, median, highest) with the scenario's workload rate replaced.
// Transaction counts are capped at `max_txs` per simulated point.
CostSweep cost_sweep(const Scenario& scenario, std::span<const double> grid,
                     std::size_t max_txs = 3000);

}  // namespace sledger::sim
