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

#include <fmt/format.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sledger/access_control.hpp"
#include "sledger/error.hpp"

namespace {

using namespace sledger;
using namespace sledger::acl;
using ledger::AclUpdate;

constexpr const char* kDoc = R"({
  "tables": [{"name": "pay", "fields": [
    {"name": "amount", "type": "integer"},
    {"name": "memo", "type": "string"},
    {"name": "secret", "type": "string"}]}],
  "default_acl": {
    "pay.*": {"read": "public", "write": ["alice", "bob"]},
    "pay.secret": {"read": ["alice"], "write": ["alice"]}
  }
})";

std::shared_ptr<const schema::CompiledChainSpec> spec() {
  return std::make_shared<const schema::CompiledChainSpec>(schema::compile_schema_json(kDoc));
}

AclUpdate update(std::string submitter, std::string path, ledger::AclMode mode,
                 std::vector<std::string> who, bool is_public = false) {
  return AclUpdate{"u", std::move(submitter), std::move(path), mode, is_public, std::move(who), {}};
}

TEST(AclState, SchemaDefaults) {
  AclState acl(spec());
  EXPECT_TRUE(acl.allows("anyone", "pay.amount", ledger::AclMode::read));
  EXPECT_TRUE(acl.allows("bob", "pay.amount", ledger::AclMode::write));
  EXPECT_FALSE(acl.allows("carol", "pay.amount", ledger::AclMode::write));
  EXPECT_FALSE(acl.allows("bob", "pay.secret", ledger::AclMode::read));
  EXPECT_EQ(acl.check_access("alice", "pay.secret", ledger::AclMode::read), Decision::allow);
  try {
    acl.check_access("alice", "pay.ghost", ledger::AclMode::read);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_found);
  }
}

TEST(AclState, OnlyCurrentWritersMayChangeAnAcl) {
  AclState acl(spec());
  EXPECT_FALSE(acl.check_update(update("carol", "pay.memo", ledger::AclMode::write, {"carol"})).empty());
  auto grant = update("bob", "pay.memo", ledger::AclMode::write, {"carol"});
  EXPECT_TRUE(acl.check_update(grant).empty());
  acl.apply(grant, 4);
  // bob handed the field to carol and is now locked out of its ACL too.
  EXPECT_TRUE(acl.allows("carol", "pay.memo", ledger::AclMode::write));
  EXPECT_FALSE(acl.allows("bob", "pay.memo", ledger::AclMode::write));
  EXPECT_FALSE(acl.check_update(update("bob", "pay.memo", ledger::AclMode::read, {"bob"})).empty());

  EXPECT_FALSE(acl.check_update(update("alice", "pay.memo", ledger::AclMode::read, {})).empty());
  EXPECT_FALSE(acl.check_update(update("alice", "pay.ghost", ledger::AclMode::read, {"a"})).empty());
}

TEST(AclState, WildcardNeedsWriteOnEveryField) {
  AclState acl(spec());
  // bob cannot write pay.secret, so cannot touch the table-wide ACL.
  EXPECT_FALSE(acl.may_update("bob", "pay.*"));
  EXPECT_TRUE(acl.may_update("alice", "pay.*"));
  acl.apply(update("alice", "pay.*", ledger::AclMode::read, {"dave"}), 2);
  EXPECT_TRUE(acl.allows("dave", "pay.amount", ledger::AclMode::read));
  EXPECT_FALSE(acl.allows("anyone", "pay.amount", ledger::AclMode::read));
  // An exact override still beats the wildcard.
  acl.apply(update("alice", "pay.memo", ledger::AclMode::read, {}, true), 3);
  EXPECT_TRUE(acl.allows("anyone", "pay.memo", ledger::AclMode::read));
  EXPECT_FALSE(acl.allows("anyone", "pay.amount", ledger::AclMode::read));
}

TEST(AclState, LineageReport) {
  AclState acl(spec());
  acl.apply(update("alice", "pay.memo", ledger::AclMode::read, {"bob", "alice"}), 3);
  acl.apply(update("alice", "pay.memo", ledger::AclMode::write, {}, true), 5);
  acl.apply(update("alice", "pay.amount", ledger::AclMode::read, {"bob"}), 6);
  EXPECT_EQ(acl.lineage("pay.memo").size(), 2u);
  EXPECT_EQ(lineage_report(acl, "pay.memo"),
            "3|pay.memo|read|alice,bob\n5|pay.memo|write|public\n");
}

TEST(ScopedRead, DeniedFieldsAreOmitted) {
  AclState acl(spec());
  substrate::KVStore kv;
  kv.write_conditional("ws:pay/p1/amount", Value::integer(5).encoded(), std::nullopt);
  kv.write_conditional("ws:pay/p1/secret", Value::string("x").encoded(), std::nullopt);
  kv.write_conditional("ws:$schema", Bytes{1}, std::nullopt);

  auto bob = scoped_read(kv, "ws:", acl, "bob", TableScan{"pay"});
  ASSERT_EQ(bob.size(), 1u);
  EXPECT_EQ(bob.at("pay/p1/amount"), Value::integer(5));
  auto alice = scoped_read(kv, "ws:", acl, "alice",
                           std::vector<std::string>{"pay/p1/secret", "pay/p1/memo", "$schema"});
  ASSERT_EQ(alice.size(), 1u);
  EXPECT_EQ(alice.at("pay/p1/secret"), Value::string("x"));
}

// Random update sequences against the reference model.
TEST(AclState, MatchesOracleOnRandomUpdates) {
  const std::vector<std::string> people = {"alice", "bob", "carol", "dave"};
  const std::vector<std::string> paths = {"pay.amount", "pay.memo", "pay.secret", "pay.*"};
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    substrate::Rng rng(seed);
    AclState acl(spec());
    sledger::testing::AclOracle oracle;
    for (const auto* f : {"amount", "memo", "secret"}) {
      oracle.add_field("pay", f);
      const bool secret = std::string(f) == "secret";
      oracle.set_default(std::string("pay.") + f, ledger::AclMode::read,
                         secret ? sledger::testing::AclOracle::Set{false, {"alice"}}
                                : sledger::testing::AclOracle::Set{true, {}});
      oracle.set_default(std::string("pay.") + f, ledger::AclMode::write,
                         secret ? sledger::testing::AclOracle::Set{false, {"alice"}}
                                : sledger::testing::AclOracle::Set{false, {"alice", "bob"}});
    }
    for (int step = 0; step < 60; ++step) {
      std::vector<std::string> who;
      for (const auto& p : people) {
        if (rng.bernoulli(0.4)) who.push_back(p);
      }
      auto u = update(people[rng.uniform_int(0, 3)], paths[rng.uniform_int(0, 3)],
                      rng.bernoulli(0.5) ? ledger::AclMode::read : ledger::AclMode::write, who,
                      rng.bernoulli(0.15));
      const bool accepted = acl.check_update(u).empty();
      ASSERT_EQ(accepted, oracle.apply(u)) << "seed " << seed << " step " << step;
      if (accepted) acl.apply(u, static_cast<std::uint64_t>(step));
      for (const auto& p : people) {
        for (const auto* f : {"pay.amount", "pay.memo", "pay.secret"}) {
          for (auto mode : {ledger::AclMode::read, ledger::AclMode::write}) {
            ASSERT_EQ(acl.allows(p, f, mode), oracle.allows(p, f, mode));
          }
        }
      }
    }
  }
}

}  // namespace
