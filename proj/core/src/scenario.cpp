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
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "sledger/error.hpp"
#include "sledger/simulation.hpp"

namespace sledger::sim {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(std::string_view where, std::string_view what) {
  throw Error(Errc::parse_error, fmt::format("scenario {}: {}", where, what));
}

std::string read_file(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(what, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Walks one JSON object, rejecting keys nobody asked for.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }
  ~Fields() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.contains(key)) fail(path_ + "/" + key, "unknown key");
    }
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (const auto* v = get(key)) {
      try {
        out = v->get<T>();
      } catch (const json::exception&) {
        fail(at(key), "wrong JSON type");
      }
    }
  }

  template <typename T>
  void read(const std::string& key, std::optional<T>& out) {
    if (const auto* v = get(key)) {
      T value{};
      try {
        value = v->get<T>();
      } catch (const json::exception&) {
        fail(at(key), "wrong JSON type");
      }
      out = value;
    }
  }

  void millis(const std::string& key, substrate::SimDuration& out) {
    double ms = substrate::to_millis(out);
    read(key, ms);
    out = substrate::seconds_f(ms / 1000.0);
  }

  void range(const std::string& key, substrate::LatencyRange& out) {
    const auto* v = get(key);
    if (v == nullptr) return;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
      fail(at(key), "expected [min_ms, max_ms]");
    }
    out.min = substrate::seconds_f((*v)[0].get<double>() / 1000.0);
    out.max = substrate::seconds_f((*v)[1].get<double>() / 1000.0);
  }

  std::string at(const std::string& key) const { return path_ + "/" + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// A count produces generated ids ("n0", "n1", ...); an array lists them.
std::vector<std::string> member_ids(const json& j, std::string_view prefix,
                                    const std::string& where) {
  std::vector<std::string> ids;
  if (j.is_number_unsigned()) {
    for (std::uint64_t i = 0; i < j.get<std::uint64_t>(); ++i) {
      ids.push_back(fmt::format("{}{}", prefix, i));
    }
  } else if (j.is_array()) {
    for (const auto& id : j) {
      if (!id.is_string()) fail(where, "member ids must be strings");
      ids.push_back(id.get<std::string>());
    }
  } else {
    fail(where, "expected a count or an array of ids");
  }
  return ids;
}

void parse_workload(const json& j, WorkloadSpec& w) {
  Fields f(j, "/workload");
  std::string shape = std::string(shape_name(w.shape));
  f.read("shape", shape);
  if (shape == "constant") {
    w.shape = Shape::constant;
  } else if (shape == "poisson") {
    w.shape = Shape::poisson;
  } else if (shape == "burst") {
    w.shape = Shape::burst;
  } else {
    fail(f.at("shape"), fmt::format("unknown shape '{}'", shape));
  }
  f.read("rate_tps", w.rate_tps);
  f.read("duration_s", w.duration_s);
  f.read("payload_fields", w.payload_fields);
  f.read("key_space", w.key_space);
  f.read("read_fraction", w.read_fraction);
  f.read("latency_bound_ms", w.latency_bound_ms);
  f.read("group_fraction", w.group_fraction);
  f.read("group_size", w.group_size);
  std::string group_mode = w.ordered_groups ? "ordered" : "unordered";
  f.read("group_mode", group_mode);
  if (group_mode != "ordered" && group_mode != "unordered") {
    fail(f.at("group_mode"), "expected 'ordered' or 'unordered'");
  }
  w.ordered_groups = group_mode == "ordered";
  f.read("burst_period_s", w.burst_period_s);
  f.read("table", w.table);
  f.read("submitters", w.submitters);
}

void parse_chain(const json& j, Scenario& s) {
  Fields f(j, "/chain");
  if (const auto* v = f.get("nodes")) s.nodes = member_ids(*v, "n", f.at("nodes"));
  if (const auto* v = f.get("clients")) s.clients = member_ids(*v, "c", f.at("clients"));
  std::string policy = std::string(ledger::policy_name(s.policy));
  f.read("policy", policy);
  auto mode = ledger::parse_policy(policy);
  if (!mode) fail(f.at("policy"), fmt::format("unknown policy '{}'", policy));
  s.policy = *mode;
  f.read("max_block_size", s.max_block_size);
  std::string leader = s.leader_mode == ledger::LeaderMode::rotating ? "rotating" : "dedicated";
  f.read("leader_mode", leader);
  if (leader == "rotating") {
    s.leader_mode = ledger::LeaderMode::rotating;
  } else if (leader == "dedicated") {
    s.leader_mode = ledger::LeaderMode::dedicated;
  } else {
    fail(f.at("leader_mode"), "expected 'rotating' or 'dedicated'");
  }
  f.read("dedicated_leader", s.dedicated_leader);
  f.read("default_latency_bound_ms", s.default_latency_bound_ms);
}

void parse_latency(const json& j, consensus::LatencyConfig& l) {
  Fields f(j, "/latency");
  f.range("invoke_ms", l.invoke);
  f.range("link_ms", l.link);
  f.millis("vote_timeout_ms", l.vote_timeout);
  f.millis("visibility_timeout_ms", l.visibility_timeout);
  f.millis("expected_commit_ms", l.expected_commit);
  f.millis("group_timeout_ms", l.group_timeout);
}

void parse_faults(const json& j, substrate::FaultPlan& plan) {
  Fields f(j, "/faults");
  if (const auto* crashes = f.get("node_crashes")) {
    if (!crashes->is_array()) fail(f.at("node_crashes"), "expected an array");
    for (std::size_t i = 0; i < crashes->size(); ++i) {
      Fields c((*crashes)[i], fmt::format("/faults/node_crashes/{}", i));
      substrate::NodeCrash crash;
      double crash_s = 0, recover_s = 0;
      c.read("node", crash.node);
      c.read("crash_s", crash_s);
      c.read("recover_s", recover_s);
      crash.crash_at = substrate::seconds_f(crash_s);
      crash.recover_at = substrate::seconds_f(recover_s);
      plan.node_crashes.push_back(std::move(crash));
    }
  }
  f.read("message_loss_rate", plan.message_loss_rate);
  f.read("message_corrupt_rate", plan.message_corrupt_rate);
  f.read("nefarious_orchestrator", plan.nefarious_orchestrator);
}

std::vector<cost::ServerfulCostParams> parse_serverful(const json& j) {
  if (!j.is_array()) fail("/serverful", "expected an array");
  std::vector<cost::ServerfulCostParams> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Fields f(j[i], fmt::format("/serverful/{}", i));
    cost::ServerfulCostParams p;
    f.read("name", p.name);
    f.read("usd_per_node_second", p.usd_per_node_second);
    f.read("nodes", p.nodes);
    f.read("max_tps", p.max_tps);
    f.read("redundancy", p.redundancy);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::string_view shape_name(Shape shape) {
  switch (shape) {
    case Shape::constant: return "constant";
    case Shape::poisson: return "poisson";
    case Shape::burst: return "burst";
  }
  return "unknown";
}

void WorkloadSpec::validate() const {
  auto bad = [](std::string_view what) { throw Error(Errc::invalid_config, std::string(what)); };
  if (!(rate_tps > 0)) bad("workload rate must be positive");
  if (!(duration_s > 0)) bad("workload duration must be positive");
  if (payload_fields == 0) bad("workload needs at least one payload field");
  if (key_space == 0) bad("workload key space must be non-empty");
  if (read_fraction < 0 || read_fraction > 1) bad("read_fraction must be in [0, 1]");
  if (group_fraction < 0 || group_fraction > 1) bad("group_fraction must be in [0, 1]");
  if (group_fraction > 0 && group_size < 2) bad("atomic groups need at least two members");
  if (shape == Shape::burst && !(burst_period_s > 0)) bad("burst period must be positive");
  if (latency_bound_ms && *latency_bound_ms == 0) bad("latency bound must be positive");
}

void Scenario::validate() const {
  workload.validate();
  if (nodes.empty()) throw Error(Errc::invalid_config, "scenario needs at least one node");
  if (apply_threads == 0) throw Error(Errc::invalid_config, "apply_threads must be >= 1");
  if (drain_s < 0) throw Error(Errc::invalid_config, "drain_s must be >= 0");
  faults.validate();
  for (const auto& c : faults.node_crashes) {
    if (std::find(nodes.begin(), nodes.end(), c.node) == nodes.end()) {
      throw Error(Errc::invalid_config, fmt::format("crash names unknown node '{}'", c.node));
    }
  }
  latency.validate();
}

std::string default_schema_json(std::uint32_t fields) {
  json f = json::array();
  for (std::uint32_t i = 0; i < fields; ++i) {
    f.push_back({{"name", fmt::format("f{}", i)}, {"type", "string"}, {"maxLength", 64}});
  }
  json doc = {{"tables", json::array({{{"name", "kv"}, {"fields", std::move(f)}}})},
              {"default_acl", {{"kv.*", {{"read", "public"}, {"write", "public"}}}}}};
  return doc.dump(2);
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = e.byte == 0 ? 0 : e.byte - 1;
    for (std::size_t i = 0; i < end && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(fmt::format("line {} column {}", line, col), e.what());
  }

  Scenario s;
  s.nodes = {"n0", "n1", "n2", "n3"};
  s.clients = {"c0", "c1"};
  Fields f(root, "");
  f.read("name", s.name);
  f.read("seed", s.seed);
  if (const auto* w = f.get("workload")) parse_workload(*w, s.workload);
  if (const auto* c = f.get("chain")) parse_chain(*c, s);
  if (const auto* l = f.get("latency")) parse_latency(*l, s.latency);
  if (const auto* p = f.get("faults")) parse_faults(*p, s.faults);

  if (const auto* schema = f.get("schema")) {
    if (schema->is_string()) {
      s.schema_json = read_file(base_dir / schema->get<std::string>(), "/schema");
    } else if (schema->is_object()) {
      s.schema_json = schema->dump(2);
    } else {
      fail("/schema", "expected a file path or an inline schema object");
    }
  } else {
    s.schema_json = default_schema_json(s.workload.payload_fields);
  }

  if (const auto* prices = f.get("unit_prices")) {
    std::string text_prices;
    if (prices->is_string()) {
      text_prices = read_file(base_dir / prices->get<std::string>(), "/unit_prices");
    } else {
      text_prices = prices->dump();
    }
    try {
      s.unit_prices = cost::unit_prices_from_json(text_prices);
    } catch (const Error& e) {
      fail("/unit_prices", e.what());
    }
  }
  if (const auto* sf = f.get("serverful")) s.serverful = parse_serverful(*sf);
  f.read("apply_threads", s.apply_threads);
  f.read("drain_s", s.drain_s);
  f.read("output_dir", s.output_dir);
  f.read("trace", s.trace);
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  auto text = read_file(file, file.string());
  auto s = parse_scenario(text, file.parent_path());
  if (!s.output_dir.empty() && std::filesystem::path(s.output_dir).is_relative()) {
    s.output_dir = (file.parent_path() / s.output_dir).string();
  }
  return s;
}

}  // namespace sledger::sim
