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

// Per-transaction cost: the serverless curve a + b/n calibrated from two
// (batch size, USD/tx) anchors, rented-server cost per transaction, and the
// billing meter the simulator charges against.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sledger::cost {

struct Anchor {
  double n = 1;
  double usd_per_tx = 0;
};

inline constexpr Anchor kSingleTxAnchor{1, 0.0001};
inline constexpr Anchor kFullBlockAnchor{900, 0.00001};

struct ServerlessCostParams {
  double a = 0;  // USD per transaction
  double b = 0;  // USD per block
  Anchor low = kSingleTxAnchor;
  Anchor high = kFullBlockAnchor;
  std::uint32_t max_block_size = 900;
};

// Solves a + b/n1 = c1, a + b/n2 = c2. Throws Errc::degenerate_anchors for
// equal or non-positive batch sizes and for solutions with a or b <= 0.
ServerlessCostParams calibrate_serverless(Anchor first = kSingleTxAnchor,
                                          Anchor second = kFullBlockAnchor,
                                          std::uint32_t max_block_size = 900);

// Throws Errc::out_of_range outside [1, max_block_size]. Takes a real n so a
// measured mean batch size can be priced directly.
double per_tx_cost_serverless(const ServerlessCostParams& params, double n);

struct ServerfulCostParams {
  std::string name;
  double usd_per_node_second = 0;
  std::uint32_t nodes = 1;
  double max_tps = 1;
  double redundancy = 1;
};

struct ServerfulCost {
  double usd_per_tx = 0;
  bool crash_risk = false;  // at or beyond the measured maximum throughput
};

ServerfulCost per_tx_cost_serverful(const ServerfulCostParams& params, double tps);

// Synthetic comparison systems: a 12-node and an 8-node deployment, each at
// x1 and x3 redundancy.
std::vector<ServerfulCostParams> default_serverful_configs();

std::uint32_t expected_batch_size(double arrival_tps, double latency_bound_s,
                                  std::uint32_t max_n);

struct CurveRow {
  double tps = 0;
  std::uint32_t batch = 1;
  double serverless = 0;
  std::vector<double> serverful;
  std::vector<bool> crash_risk;
};

struct Crossover {
  std::string config;
  double tps = 0;
  bool serverless_cheaper_below = true;
};

struct CostCurve {
  std::vector<std::string> configs;
  std::vector<CurveRow> rows;
  std::vector<Crossover> crossovers;

  std::string csv() const;
};

CostCurve generate_cost_curve(const ServerlessCostParams& serverless,
                              std::span<const ServerfulCostParams> serverful,
                              std::span<const double> grid, double latency_bound_s);

// "a:b:step" -> a, a+step, ... <= b.
std::vector<double> parse_grid(std::string_view spec);

// ---------------------------------------------------------------------------

struct UnitPrices {
  double gateway_invocation = 0;
  double consensus_invocation = 0;
  double queue_op = 0;
  double kv_write = 0;

  bool operator==(const UnitPrices&) const = default;
};

// Prices that make one transaction cost `a` and one block cost `b` for a
// network of `nodes` nodes writing `writes_per_tx` fields per transaction.
UnitPrices calibrate_unit_prices(const ServerlessCostParams& params, std::size_t nodes,
                                 double writes_per_tx);

std::string unit_prices_to_json(const UnitPrices& prices);
UnitPrices unit_prices_from_json(std::string_view json);

struct BillingMeter {
  std::uint64_t gateway_invocations = 0;
  std::uint64_t consensus_invocations = 0;
  std::uint64_t queue_ops = 0;
  std::uint64_t kv_writes = 0;

  double total(const UnitPrices& prices) const;
};

}  // namespace sledger::cost
