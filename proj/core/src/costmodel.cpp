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

#include "sledger/costmodel.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "json.hpp"
#include "sledger/error.hpp"

namespace sledger::cost {
namespace {

// Synthetic server price, roughly an 8-vCPU on-demand instance.
constexpr double kNodeUsdPerSecond = 1.89e-4;

// Default meter prices for the two substrate operations priced per unit;
// invocation prices are solved for.
constexpr double kQueueOpUsd = 4e-7;
constexpr double kKvWriteUsd = 1e-6;

// Queue operations per transaction: enqueue, receive, ack.
constexpr double kQueueOpsPerTx = 3;

double parse_double(std::string_view text) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(Errc::parse_error, fmt::format("'{}' is not a number", text));
  }
  return v;
}

}  // namespace

ServerlessCostParams calibrate_serverless(Anchor first, Anchor second,
                                          std::uint32_t max_block_size) {
  if (first.n <= 0 || second.n <= 0 || first.n == second.n) {
    throw Error(Errc::degenerate_anchors,
                fmt::format("anchors need distinct positive batch sizes (got {} and {})", first.n,
                            second.n));
  }
  // a + b/n1 = c1 and a + b/n2 = c2  =>  b = (c1 - c2) / (1/n1 - 1/n2).
  const double inv1 = 1.0 / first.n;
  const double inv2 = 1.0 / second.n;
  ServerlessCostParams p;
  p.b = (first.usd_per_tx - second.usd_per_tx) / (inv1 - inv2);
  p.a = first.usd_per_tx - p.b * inv1;
  p.low = first.n < second.n ? first : second;
  p.high = first.n < second.n ? second : first;
  p.max_block_size = max_block_size;
  if (!(p.a > 0) || !(p.b > 0)) {
    throw Error(Errc::degenerate_anchors,
                fmt::format("anchors give a = {}, b = {}; both must be positive", p.a, p.b));
  }
  return p;
}

double per_tx_cost_serverless(const ServerlessCostParams& params, double n) {
  if (!(n >= 1) || n > params.max_block_size) {
    throw Error(Errc::out_of_range,
                fmt::format("batch size {} outside [1, {}]", n, params.max_block_size));
  }
  return params.a + params.b / n;
}

ServerfulCost per_tx_cost_serverful(const ServerfulCostParams& params, double tps) {
  if (!(tps > 0)) throw Error(Errc::invalid_argument, "throughput must be positive");
  if (!(params.max_tps > 0)) throw Error(Errc::invalid_argument, "max throughput must be positive");
  const double per_second = params.nodes * params.usd_per_node_second * params.redundancy;
  return ServerfulCost{per_second / tps, tps >= params.max_tps};
}

std::vector<ServerfulCostParams> default_serverful_configs() {
  return {
      {"fabric_x1", kNodeUsdPerSecond, 12, 3000, 1},
      {"fabric_x3", kNodeUsdPerSecond, 12, 3000, 3},
      {"quorum_x1", kNodeUsdPerSecond, 8, 2000, 1},
      {"quorum_x3", kNodeUsdPerSecond, 8, 2000, 3},
  };
}

std::uint32_t expected_batch_size(double arrival_tps, double latency_bound_s,
                                  std::uint32_t max_n) {
  if (!(arrival_tps > 0) || !(latency_bound_s > 0)) {
    throw Error(Errc::invalid_argument, "arrival rate and latency bound must be positive");
  }
  // Relative slack so products like 10 * 0.1 are not floored to 0.
  const double product = std::floor(arrival_tps * latency_bound_s * (1 + 1e-12));
  if (product < 1) return 1;
  if (product >= max_n) return max_n;
  return static_cast<std::uint32_t>(product);
}

CostCurve generate_cost_curve(const ServerlessCostParams& serverless,
                              std::span<const ServerfulCostParams> serverful,
                              std::span<const double> grid, double latency_bound_s) {
  if (grid.empty()) throw Error(Errc::invalid_argument, "empty throughput grid");
  CostCurve curve;
  for (const auto& s : serverful) curve.configs.push_back(s.name);
  for (double tps : grid) {
    CurveRow row;
    row.tps = tps;
    row.batch = expected_batch_size(tps, latency_bound_s, serverless.max_block_size);
    row.serverless = per_tx_cost_serverless(serverless, row.batch);
    for (const auto& s : serverful) {
      auto c = per_tx_cost_serverful(s, tps);
      row.serverful.push_back(c.usd_per_tx);
      row.crash_risk.push_back(c.crash_risk);
    }
    curve.rows.push_back(std::move(row));
  }
  for (std::size_t c = 0; c < serverful.size(); ++c) {
    for (std::size_t i = 0; i + 1 < curve.rows.size(); ++i) {
      const auto& lo = curve.rows[i];
      const auto& hi = curve.rows[i + 1];
      const double d0 = lo.serverless - lo.serverful[c];
      const double d1 = hi.serverless - hi.serverful[c];
      if ((d0 < 0) == (d1 < 0)) continue;
      const double t = lo.tps + (hi.tps - lo.tps) * d0 / (d0 - d1);
      curve.crossovers.push_back(Crossover{curve.configs[c], t, d0 < 0});
    }
  }
  return curve;
}

std::string CostCurve::csv() const {
  std::string out = "throughput_tps,serverless_usd_per_tx";
  for (const auto& c : configs) out += fmt::format(",{}_usd_per_tx", c);
  out += '\n';
  for (const auto& row : rows) {
    out += fmt::format("{},{}", row.tps, row.serverless);
    for (double v : row.serverful) out += fmt::format(",{}", v);
    out += '\n';
  }
  return out;
}

std::vector<double> parse_grid(std::string_view spec) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3) {
    throw Error(Errc::parse_error, fmt::format("grid '{}' is not a:b:step", spec));
  }
  const double a = parse_double(parts[0]);
  const double b = parse_double(parts[1]);
  const double step = parse_double(parts[2]);
  if (!(a > 0) || b < a || !(step > 0)) {
    throw Error(Errc::parse_error,
                fmt::format("grid '{}' needs 0 < a <= b and a positive step", spec));
  }
  std::vector<double> grid;
  for (std::uint64_t k = 0;; ++k) {
    const double v = a + static_cast<double>(k) * step;
    if (v > b * (1 + 1e-12)) break;
    grid.push_back(v);
  }
  return grid;
}

// ---------------------------------------------------------------------------

UnitPrices calibrate_unit_prices(const ServerlessCostParams& params, std::size_t nodes,
                                 double writes_per_tx) {
  if (nodes == 0 || writes_per_tx <= 0) {
    throw Error(Errc::invalid_argument, "need at least one node and one write per transaction");
  }
  const double n = static_cast<double>(nodes);
  UnitPrices p;
  p.queue_op = kQueueOpUsd;
  const double per_tx_budget = params.a - kQueueOpsPerTx * p.queue_op;
  if (!(per_tx_budget > 0)) {
    throw Error(Errc::invalid_config, "per-transaction cost too small for the queue price");
  }
  // World-state writes take at most 80 % of what is left; the gateway
  // invocation absorbs the rest.
  p.kv_write = std::min(kKvWriteUsd, 0.8 * per_tx_budget / (n * writes_per_tx));
  p.gateway_invocation = per_tx_budget - n * writes_per_tx * p.kv_write;
  // Per block: one orchestrator run, a verify and an apply invocation per
  // node, and a pending plus a ledger write per node.
  const double per_block_budget = params.b - 2 * n * p.kv_write;
  if (!(per_block_budget > 0)) {
    throw Error(Errc::invalid_config, "per-block cost too small for the storage price");
  }
  p.consensus_invocation = per_block_budget / (1 + 2 * n);
  return p;
}

std::string unit_prices_to_json(const UnitPrices& prices) {
  nlohmann::ordered_json j;
  j["gateway_invocation"] = prices.gateway_invocation;
  j["consensus_invocation"] = prices.consensus_invocation;
  j["queue_op"] = prices.queue_op;
  j["kv_write"] = prices.kv_write;
  return j.dump(2);
}

UnitPrices unit_prices_from_json(std::string_view json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::parse_error, fmt::format("unit prices: {}", e.what()));
  }
  if (!j.is_object()) throw Error(Errc::parse_error, "unit prices: expected an object");
  UnitPrices p;
  const std::pair<const char*, double*> fields[] = {
      {"gateway_invocation", &p.gateway_invocation},
      {"consensus_invocation", &p.consensus_invocation},
      {"queue_op", &p.queue_op},
      {"kv_write", &p.kv_write},
  };
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& [name, slot] : fields) {
      if (key != name) continue;
      known = true;
      if (!value.is_number() || value.get<double>() < 0) {
        throw Error(Errc::parse_error,
                    fmt::format("unit prices: '{}' must be a non-negative number", key));
      }
      *slot = value.get<double>();
    }
    if (!known) throw Error(Errc::parse_error, fmt::format("unit prices: unknown key '{}'", key));
  }
  for (const auto& [name, slot] : fields) {
    if (!j.contains(name)) {
      throw Error(Errc::parse_error, fmt::format("unit prices: missing '{}'", name));
    }
  }
  return p;
}

double BillingMeter::total(const UnitPrices& prices) const {
  return static_cast<double>(gateway_invocations) * prices.gateway_invocation +
         static_cast<double>(consensus_invocations) * prices.consensus_invocation +
         static_cast<double>(queue_ops) * prices.queue_op +
         static_cast<double>(kv_writes) * prices.kv_write;
}

}  // namespace sledger::cost
