#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace ticketscope {

// Validator for the JSON-schema subset used by the service response
// documents: type, enum, const, properties, required, additionalProperties,
// items, minItems, maxItems, minLength, minimum, maximum, anyOf, and local
// "$ref": "#/$defs/<name>". Unknown keywords are ignored.
class SchemaValidator {
 public:
  explicit SchemaValidator(nlohmann::json schema);
  static SchemaValidator from_file(const std::filesystem::path& path);

  // Empty when the instance is valid; otherwise one message per violation,
  // each prefixed with a JSON pointer to the offending value.
  std::vector<std::string> validate(const nlohmann::json& instance) const;

 private:
  void check(const nlohmann::json& schema, const nlohmann::json& value, const std::string& where,
             std::vector<std::string>& errors, int depth) const;
  const nlohmann::json& resolve(const nlohmann::json& schema) const;

  nlohmann::json root_;
};

}  // namespace ticketscope
