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

#include "fixtures.hpp"
#include "sledger/schema.hpp"

namespace {

using namespace sledger;
using namespace sledger::schema;

constexpr const char* kOrders = R"({
  "tables": [
    {"name": "orders", "fields": [
      {"name": "sku", "type": "string", "required": true, "pattern": "^[A-Z]{3}-[0-9]+$"},
      {"name": "qty", "type": "integer", "minimum": 1, "maximum": 100},
      {"name": "price", "type": "decimal", "minimum": 0},
      {"name": "paid", "type": "boolean"},
      {"name": "blob", "type": "bytes", "maxLength": 4},
      {"name": "customer", "type": "reference", "table": "customers"}
    ]},
    {"name": "customers", "fields": [{"name": "name", "type": "string", "minLength": 1}]}
  ],
  "default_acl": {
    "orders.*": {"read": "public", "write": ["c0", "n0"]},
    "orders.price": {"write": ["n0"]},
    "customers.*": {"read": ["c0"], "write": ["c0"]}
  }
})";

std::vector<std::string> diag_paths(const std::function<void()>& f) {
  try {
    f();
  } catch (const SchemaError& e) {
    std::vector<std::string> out;
    for (const auto& d : e.diagnostics()) out.push_back(d.path);
    return out;
  }
  return {};
}

ledger::Transaction tx_with(std::vector<ledger::WriteOp> writes) {
  ledger::Transaction tx;
  tx.tx_id = "t";
  tx.writes = std::move(writes);
  return tx;
}

TEST(CompileSchema, RegistryAndAclDefaults) {
  auto spec = compile_schema_json(kOrders);
  EXPECT_EQ(spec.fields().size(), 7u);
  EXPECT_EQ(spec.table_fields("orders"),
            (std::vector<std::string>{"sku", "qty", "price", "paid", "blob", "customer"}));
  const auto* price = spec.find("orders.price");
  ASSERT_NE(price, nullptr);
  EXPECT_EQ(price->type, ValueType::decimal);
  EXPECT_TRUE(price->readers.is_public);  // from the wildcard
  EXPECT_EQ(price->writers.sorted(), std::vector<std::string>{"n0"});  // exact wins
  EXPECT_EQ(spec.find("orders.qty")->writers.sorted(), (std::vector<std::string>{"c0", "n0"}));
  EXPECT_EQ(spec.find("orders.nope"), nullptr);
}

TEST(CompileSchema, DigestIgnoresFormatting) {
  auto a = compile_schema_json(kOrders);
  auto b = compile_schema_json(SchemaDoc::parse(kOrders).to_json());
  EXPECT_EQ(a.digest(), b.digest());
  auto changed = std::string(kOrders);
  changed.replace(changed.find("\"maximum\": 100"), 14, "\"maximum\": 101");
  EXPECT_NE(compile_schema_json(changed).digest(), a.digest());
}

TEST(CompileSchema, ReportsEveryProblemWithItsPath) {
  auto paths = diag_paths([] {
    compile_schema_json(R"({"tables": [
      {"name": "t", "fields": [
        {"name": "a", "type": "float"},
        {"name": "b", "type": "reference", "table": "ghost"},
        {"name": "c", "type": "integer", "minimum": 5, "maximum": 1},
        {"name": "c", "type": "string"},
        {"name": "d", "type": "string", "pattern": "("}
      ]}],
      "default_acl": {"t.zz": {"read": "public"}}})");
  });
  EXPECT_EQ(paths, (std::vector<std::string>{"t.a", "t.b", "t.c", "t.c", "t.d", "t.zz"}));
}

TEST(CompileSchema, ParseErrorsCarryLineAndColumn) {
  try {
    compile_schema_json("{\n  \"tables\": [\n    {,}\n]}");
    FAIL();
  } catch (const SchemaError& e) {
    ASSERT_EQ(e.diagnostics().size(), 1u);
    EXPECT_NE(e.diagnostics()[0].message.find("line 3"), std::string::npos)
        << e.diagnostics()[0].message;
  }
  EXPECT_EQ(diag_paths([] { compile_schema_json(R"({"tables": [], "extra": 1})"); }),
            std::vector<std::string>{"extra"});
}

TEST(ValidatePayload, TypesAndConstraints) {
  auto spec = compile_schema_json(kOrders);
  auto ok = tx_with({{FieldKey{"orders", "o1", "sku"}, Value::string("ABC-12")},
                     {FieldKey{"orders", "o1", "qty"}, Value::integer(3)},
                     {FieldKey{"orders", "o1", "customer"}, Value::reference("u1")}});
  EXPECT_TRUE(validate_payload(spec, ok).empty());

  auto bad = tx_with({{FieldKey{"orders", "o1", "sku"}, Value::string("abc")},
                      {FieldKey{"orders", "o1", "qty"}, Value::integer(0)},
                      {FieldKey{"orders", "o1", "price"}, Value::string("1.0")},
                      {FieldKey{"orders", "o1", "blob"}, Value::bytes(Bytes(5))},
                      {FieldKey{"orders", "o1", "nope"}, Value::boolean(true)},
                      {FieldKey{"orders", "o1", "qty"}, Value::integer(2)}});
  auto v = validate_payload(spec, bad);
  std::vector<std::string> keys;
  for (const auto& x : v) keys.push_back(x.path);
  EXPECT_EQ(keys, (std::vector<std::string>{"orders/o1/sku", "orders/o1/qty", "orders/o1/price",
                                            "orders/o1/blob", "orders/o1/nope",
                                            "orders/o1/qty"}));

  auto nan = tx_with({{FieldKey{"orders", "o1", "price"}, Value::decimal(std::nan(""))}});
  EXPECT_EQ(validate_payload(spec, nan).size(), 1u);
  EXPECT_EQ(validate_payload(spec, tx_with({})).size(), 1u);
}

TEST(ValidatePayload, NewRowsNeedRequiredFields) {
  auto spec = compile_schema_json(kOrders);
  auto tx = tx_with({{FieldKey{"orders", "o9", "qty"}, Value::integer(3)}});
  EXPECT_EQ(validate_payload(spec, tx, [](const std::string&) { return false; }).size(), 1u);
  EXPECT_TRUE(validate_payload(spec, tx, [](const std::string&) { return true; }).empty());
  EXPECT_TRUE(validate_payload(spec, tx).empty());
}

TEST(ValidatePayload, ReadsMustResolve) {
  auto spec = compile_schema_json(kOrders);
  auto tx = tx_with({{FieldKey{"orders", "o1", "qty"}, Value::integer(3)}});
  tx.reads = {{"orders/o2/qty", 1}, {"orders/o2/ghost", 0}, {"garbage", 0}};
  EXPECT_EQ(validate_payload(spec, tx).size(), 2u);
}

TEST(CheckAdditive, OnlyOptionalAdditions) {
  auto base = compile_schema_json(kOrders);
  auto doc = SchemaDoc::parse(kOrders);
  doc.tables[1].fields.push_back({"email", "string", false, {}});
  doc.tables.push_back({"audit", {{"note", "string", true, {}}}});
  EXPECT_TRUE(check_additive(base, compile_schema(doc)).empty());

  auto required = SchemaDoc::parse(kOrders);
  required.tables[1].fields.push_back({"email", "string", true, {}});
  EXPECT_EQ(check_additive(base, compile_schema(required)).size(), 1u);

  auto retyped = SchemaDoc::parse(kOrders);
  retyped.tables[0].fields[1].type = "decimal";
  EXPECT_EQ(check_additive(base, compile_schema(retyped)).size(), 1u);

  auto removed = SchemaDoc::parse(kOrders);
  removed.tables[0].fields.pop_back();
  EXPECT_EQ(check_additive(base, compile_schema(removed)).size(), 1u);
}

}  // namespace
