#include <gtest/gtest.h>

#include "test_support.h"
#include "ticketscope/error.h"
#include "ticketscope/schema.h"

namespace ticketscope {
namespace {

using nlohmann::json;

const json kSchema = json::parse(R"({
  "type": "object",
  "properties": {
    "name": {"type": "string", "minLength": 2},
    "count": {"type": "integer", "minimum": 0, "maximum": 10},
    "ratio": {"type": "number"},
    "mode": {"enum": ["a", "b"]},
    "fixed": {"const": "ok"},
    "tags": {"type": "array", "items": {"type": "string"}, "minItems": 1, "maxItems": 2},
    "either": {"anyOf": [{"type": "integer"}, {"type": "null"}]},
    "child": {"$ref": "#/$defs/child"}
  },
  "required": ["name"],
  "additionalProperties": false,
  "$defs": {
    "child": {"type": "object", "properties": {"x": {"type": "boolean"}}, "required": ["x"]}
  }
})");

TEST(SchemaValidator, AcceptsConformingDocument) {
  const SchemaValidator v(kSchema);
  const json ok = {{"name", "ab"},  {"count", 10},      {"ratio", 3},          {"mode", "b"}, {"fixed", "ok"},
                   {"tags", {"x"}}, {"either", nullptr}, {"child", {{"x", true}}}};
  EXPECT_TRUE(v.validate(ok).empty());
  EXPECT_TRUE(v.validate({{"name", "zz"}}).empty());
}

TEST(SchemaValidator, ReportsEachViolationWithPointer) {
  const SchemaValidator v(kSchema);
  const std::vector<std::pair<json, std::string>> cases{
      {{{"count", 1}}, ""},
      {{{"name", "a"}}, "/name"},
      {{{"name", 5}}, "/name"},
      {{{"name", "ab"}, {"count", 11}}, "/count"},
      {{{"name", "ab"}, {"count", -1}}, "/count"},
      {{{"name", "ab"}, {"count", 1.5}}, "/count"},
      {{{"name", "ab"}, {"ratio", "1"}}, "/ratio"},
      {{{"name", "ab"}, {"mode", "c"}}, "/mode"},
      {{{"name", "ab"}, {"fixed", "no"}}, "/fixed"},
      {{{"name", "ab"}, {"tags", json::array()}}, "/tags"},
      {{{"name", "ab"}, {"tags", {"a", "b", "c"}}}, "/tags"},
      {{{"name", "ab"}, {"tags", {"a", 1}}}, "/tags/1"},
      {{{"name", "ab"}, {"either", "s"}}, "/either"},
      {{{"name", "ab"}, {"child", json::object()}}, "/child"},
      {{{"name", "ab"}, {"child", {{"x", 1}}}}, "/child/x"},
      {{{"name", "ab"}, {"extra", 1}}, ""},
  };
  for (const auto& [doc, where] : cases) {
    const auto errors = v.validate(doc);
    ASSERT_EQ(errors.size(), 1u) << doc.dump();
    EXPECT_TRUE(errors[0].starts_with((where.empty() ? "/" : where) + ":")) << errors[0];
  }
  EXPECT_EQ(v.validate({{"count", "x"}, {"extra", 1}}).size(), 3u);
}

TEST(SchemaValidator, IntegerAndNumberTypes) {
  const SchemaValidator integer(json{{"type", "integer"}});
  EXPECT_TRUE(integer.validate(3).empty());
  EXPECT_TRUE(integer.validate(3u).empty());
  EXPECT_TRUE(integer.validate(3.0).empty());
  EXPECT_FALSE(integer.validate(3.5).empty());
  EXPECT_FALSE(integer.validate(true).empty());
  const SchemaValidator number(json{{"type", "number"}});
  EXPECT_TRUE(number.validate(-2).empty());
  EXPECT_FALSE(number.validate("2").empty());
}

TEST(SchemaValidator, RejectsBrokenSchemas) {
  EXPECT_THROW(SchemaValidator(json::array()), InvalidInput);
  EXPECT_THROW(SchemaValidator(json{{"type", "decimal"}}).validate(1), InvalidInput);
  EXPECT_THROW(SchemaValidator(json{{"$ref", "#/$defs/none"}}).validate(1), InvalidInput);
  EXPECT_THROW(SchemaValidator(json{{"$ref", "other.json#/x"}}).validate(1), InvalidInput);
}

TEST(SchemaFiles, AllShippedSchemasLoad) {
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(testing::schema_dir())) {
    if (entry.path().extension() != ".json") continue;
    ++n;
    EXPECT_NO_THROW(SchemaValidator::from_file(entry.path())) << entry.path();
  }
  EXPECT_EQ(n, 11u);
  const auto error = SchemaValidator::from_file(testing::schema_dir() / "error.json");
  EXPECT_TRUE(error.validate({{"error", {{"code", 404}, {"message", "x"}}}}).empty());
  EXPECT_FALSE(error.validate({{"error", {{"code", 200}, {"message", "x"}}}}).empty());
}

}  // namespace
}  // namespace ticketscope
