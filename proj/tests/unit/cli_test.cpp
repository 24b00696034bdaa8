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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           fmt::format("sledger-cli-{}", ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name, std::ios::binary) << text;
    return dir_ / name;
  }

  int sledger(const std::string& args) {
    auto cmd = fmt::format("'{}' {} > '{}' 2> '{}'", SLEDGER_CLI, args, (dir_ / "stdout").string(),
                           (dir_ / "stderr").string());
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path small_scenario() {
    return write("scenario.json", R"({
      "name": "cli", "seed": 4,
      "chain": {"nodes": 3},
      "workload": {"rate_tps": 40, "duration_s": 1},
      "trace": false
    })");
  }

  fs::path dir_;
};

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(sledger("--help"), 0);
  EXPECT_EQ(sledger(""), 1);
  EXPECT_EQ(sledger("frobnicate"), 1);
  EXPECT_EQ(sledger(fmt::format("run '{}'", (dir_ / "missing.json").string())), 1);
  auto bad = write("bad.json", "{\"chain\": {\"nodes\": 3,}}");
  EXPECT_EQ(sledger(fmt::format("run '{}'", bad.string())), 1);
  EXPECT_NE(read("stderr").find("line 1"), std::string::npos) << read("stderr");
}

TEST_F(Cli, RunThenAudit) {
  auto out = dir_ / "out";
  ASSERT_EQ(sledger(fmt::format("run '{}' --out '{}'", small_scenario().string(), out.string())), 0)
      << read("stderr");
  EXPECT_NE(read("stdout").find("\"committed\": 40"), std::string::npos) << read("stdout");
  ASSERT_TRUE(fs::exists(out / "ledger.bin"));

  EXPECT_EQ(sledger(fmt::format("audit '{}'", (out / "ledger.bin").string())), 0) << read("stderr");
  EXPECT_NE(read("stdout").find("|state|ok"), std::string::npos);

  // Flip one byte in the middle of the export.
  std::string bytes;
  {
    std::ifstream in(out / "ledger.bin", std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    bytes = s.str();
  }
  bytes[bytes.size() / 2] ^= 0x20;
  auto tampered = write("tampered.bin", bytes);
  EXPECT_EQ(sledger(fmt::format("audit '{}' --config '{}'", tampered.string(),
                                (out / "chain_config.json").string())),
            2);
  EXPECT_NE(read("stderr").find("audit failed at height"), std::string::npos);

  auto empty = write("empty.bin", "");
  EXPECT_EQ(sledger(fmt::format("audit '{}' --config '{}'", empty.string(),
                                (out / "chain_config.json").string())),
            1);
}

TEST_F(Cli, SeedOverrideChangesLedger) {
  auto scenario = small_scenario();
  ASSERT_EQ(sledger(fmt::format("run '{}' --out '{}'", scenario.string(), (dir_ / "a").string())), 0);
  ASSERT_EQ(sledger(fmt::format("run '{}' --seed 99 --out '{}'", scenario.string(),
                                (dir_ / "b").string())),
            0);
  ASSERT_EQ(sledger(fmt::format("run '{}' --out '{}'", scenario.string(), (dir_ / "c").string())), 0);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  EXPECT_EQ(slurp(dir_ / "a" / "ledger.bin"), slurp(dir_ / "c" / "ledger.bin"));
  EXPECT_NE(slurp(dir_ / "a" / "ledger.bin"), slurp(dir_ / "b" / "ledger.bin"));
}

TEST_F(Cli, CostSweep) {
  ASSERT_EQ(sledger(fmt::format("costsweep '{}' --grid 1:2001:100 --max-txs 200 --out '{}'",
                                small_scenario().string(), dir_.string())),
            0)
      << read("stderr");
  auto csv = read("cost_curve.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 22);
  EXPECT_NE(read("stderr").find("crossover fabric_x1"), std::string::npos);
  EXPECT_EQ(sledger(fmt::format("costsweep '{}' --grid 5:1:1", small_scenario().string())), 1);
}

TEST_F(Cli, CompileSchema) {
  auto good = write("good.json", R"({"tables": [{"name": "t", "fields": [
      {"name": "a", "type": "integer", "required": true, "minimum": 0}]}],
      "default_acl": {"t.a": {"read": "public", "write": ["c0"]}}})");
  EXPECT_EQ(sledger(fmt::format("compile '{}'", good.string())), 0) << read("stderr");
  EXPECT_NE(read("stdout").find("t.a integer required"), std::string::npos) << read("stdout");

  auto bad = write("bad.json", R"({"tables": [{"name": "t", "fields": [
      {"name": "a", "type": "colour"}]}]})");
  EXPECT_EQ(sledger(fmt::format("compile '{}'", bad.string())), 1);
  EXPECT_FALSE(read("stderr").empty());
}

}  // namespace
