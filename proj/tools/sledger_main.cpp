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
// sledger: run scenarios, audit exported ledgers, sweep cost curves and
// compile schema documents.
//
// Exit codes: 0 success, 1 usage or parse error, 2 invariant violation or
// failed audit.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "sledger/error.hpp"
#include "sledger/integrity.hpp"
#include "sledger/schema.hpp"
#include "sledger/simulation.hpp"

namespace {

namespace fs = std::filesystem;
using namespace sledger;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kViolation = 2;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::invalid_argument, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
};

sim::Scenario scenario_from(const std::string& file, const Common& common) {
  auto s = sim::load_scenario(file);
  if (common.seed) s.seed = *common.seed;
  if (!common.out.empty()) s.output_dir = common.out;
  return s;
}

int cmd_run(const std::string& file, const Common& common) {
  auto scenario = scenario_from(file, common);
  auto artifacts = sim::run_scenario(scenario);
  const auto& r = artifacts.report;
  if (!scenario.output_dir.empty()) {
    artifacts.write(scenario.output_dir);
    std::cerr << "artifacts written to " << scenario.output_dir << "\n";
  }
  std::cout << r.to_json();
  for (const auto& c : r.invariants) {
    if (!c.ok) std::cerr << "invariant violated: " << c.name << ": " << c.detail << "\n";
  }
  return r.ok() ? kOk : kViolation;
}

int cmd_audit(const std::string& file, std::string config_file) {
  if (config_file.empty()) {
    config_file = (fs::path(file).parent_path() / "chain_config.json").string();
  }
  auto config = ledger::chain_config_from_json(slurp(config_file));
  auto bytes = slurp(file);
  if (bytes.empty()) {
    std::cerr << "audit: " << file << " is empty\n";
    return kUsage;
  }
  auto report = integrity::audit_export(
      config, ByteView(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
  std::cout << report.text();
  if (!report.ok) {
    std::cerr << "audit failed";
    if (report.first_invalid) std::cerr << " at height " << *report.first_invalid;
    std::cerr << "\n";
    return kViolation;
  }
  return kOk;
}

int cmd_costsweep(const std::string& file, const std::string& grid_spec, std::size_t max_txs,
                  const Common& common) {
  auto scenario = scenario_from(file, common);
  auto grid = cost::parse_grid(grid_spec);
  auto sweep = sim::cost_sweep(scenario, grid, max_txs);
  auto csv = sweep.csv();
  if (!scenario.output_dir.empty()) {
    fs::create_directories(scenario.output_dir);
    std::ofstream(fs::path(scenario.output_dir) / "cost_curve.csv") << csv;
  }
  std::cout << csv;
  for (const auto& c : sweep.curve.crossovers) {
    std::cerr << fmt::format("crossover {}: {:.1f} tx/s (serverless cheaper {})\n", c.config,
                             c.tps, c.serverless_cheaper_below ? "below" : "above");
  }
  return kOk;
}

int cmd_compile(const std::string& file) {
  try {
    auto spec = schema::compile_schema_json(slurp(file));
    std::cout << "digest " << spec.digest().hex() << "\n";
    for (const auto& [path, f] : spec.fields()) {
      std::cout << fmt::format("{} {}{} read={} write={}\n", path, value_type_name(f.type),
                               f.required ? " required" : "", f.readers.display(),
                               f.writers.display());
    }
    return kOk;
  } catch (const schema::SchemaError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << file << ": " << d.str() << "\n";
    return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serverless permissioned ledger simulator"};
  app.require_subcommand(1);
  app.fallthrough();  // --seed/--out may follow the subcommand
  Common common;
  app.add_option("--seed", common.seed, "Override the scenario seed");
  app.add_option("--out", common.out, "Output directory for artifacts");

  std::string scenario_file, ledger_file, config_file, grid = "1:10000:100", schema_file;
  std::size_t max_txs = 3000;

  auto* run = app.add_subcommand("run", "Run a scenario and print its report");
  run->add_option("scenario", scenario_file, "Scenario JSON file")->required();

  auto* audit = app.add_subcommand("audit", "Audit an exported ledger");
  audit->add_option("ledger", ledger_file, "Ledger export (ledger.bin)")->required();
  audit->add_option("--config", config_file,
                    "Chain config JSON (default: chain_config.json next to the ledger)");

  auto* sweep = app.add_subcommand("costsweep", "Per-transaction cost curve");
  sweep->add_option("scenario", scenario_file, "Scenario JSON file")->required();
  sweep->add_option("--grid", grid, "Throughput grid a:b:step (tx/s)");
  sweep->add_option("--max-txs", max_txs, "Cap on simulated transactions per measured point");

  auto* compile = app.add_subcommand("compile", "Compile a schema document");
  compile->add_option("schema", schema_file, "Schema JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(scenario_file, common);
    if (*audit) return cmd_audit(ledger_file, config_file);
    if (*sweep) return cmd_costsweep(scenario_file, grid, max_txs, common);
    if (*compile) return cmd_compile(schema_file);
  } catch (const schema::SchemaError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << "schema: " << d.str() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
