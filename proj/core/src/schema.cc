#include "ticketscope/schema.h"

#include "ticketscope/blob.h"
#include "ticketscope/error.h"

namespace ticketscope {

namespace {

bool has_type(const nlohmann::json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    if (!v.is_number_float()) return false;
    const double d = v.get<double>();
    return d == static_cast<double>(static_cast<long long>(d));
  }
  throw InvalidInput("unknown schema type '" + type + "'");
}

std::string child(const std::string& where, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') escaped += "~0";
    else if (c == '/') escaped += "~1";
    else escaped += c;
  }
  return where + "/" + escaped;
}

}  // namespace

SchemaValidator::SchemaValidator(nlohmann::json schema) : root_(std::move(schema)) {
  if (!root_.is_object()) throw InvalidInput("schema must be a JSON object");
}

SchemaValidator SchemaValidator::from_file(const std::filesystem::path& path) {
  return SchemaValidator(read_json_file(path));
}

const nlohmann::json& SchemaValidator::resolve(const nlohmann::json& schema) const {
  if (!schema.contains("$ref")) return schema;
  const std::string ref = schema["$ref"].get<std::string>();
  const std::string prefix = "#/$defs/";
  if (!ref.starts_with(prefix)) throw InvalidInput("unsupported $ref '" + ref + "'");
  const std::string name = ref.substr(prefix.size());
  if (!root_.contains("$defs") || !root_["$defs"].contains(name))
    throw InvalidInput("unresolved $ref '" + ref + "'");
  return root_["$defs"][name];
}

std::vector<std::string> SchemaValidator::validate(const nlohmann::json& instance) const {
  std::vector<std::string> errors;
  check(root_, instance, "", errors, 0);
  return errors;
}

void SchemaValidator::check(const nlohmann::json& raw, const nlohmann::json& v, const std::string& where,
                            std::vector<std::string>& errors, int depth) const {
  if (depth > 64) throw InvalidInput("schema nesting too deep at " + where);
  const nlohmann::json& s = resolve(raw);
  const std::string at = where.empty() ? "/" : where;

  if (s.contains("type")) {
    bool ok = false;
    if (s["type"].is_array()) {
      for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
    } else {
      ok = has_type(v, s["type"].get<std::string>());
    }
    if (!ok) {
      errors.push_back(at + ": expected type " + s["type"].dump() + ", got " + v.type_name());
      return;
    }
  }
  if (s.contains("const") && v != s["const"])
    errors.push_back(at + ": expected constant " + s["const"].dump());
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found = found || e == v;
    if (!found) errors.push_back(at + ": " + v.dump() + " not in " + s["enum"].dump());
  }
  if (v.is_number()) {
    const double d = v.get<double>();
    if (s.contains("minimum") && d < s["minimum"].get<double>())
      errors.push_back(at + ": " + v.dump() + " below minimum " + s["minimum"].dump());
    if (s.contains("maximum") && d > s["maximum"].get<double>())
      errors.push_back(at + ": " + v.dump() + " above maximum " + s["maximum"].dump());
  }
  if (v.is_string() && s.contains("minLength") &&
      v.get_ref<const std::string&>().size() < s["minLength"].get<std::size_t>())
    errors.push_back(at + ": string shorter than " + s["minLength"].dump());
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
      errors.push_back(at + ": fewer than " + s["minItems"].dump() + " items");
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
      errors.push_back(at + ": more than " + s["maxItems"].dump() + " items");
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i)
        check(s["items"], v[i], where + "/" + std::to_string(i), errors, depth + 1);
  }
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& r : s["required"])
        if (!v.contains(r.get<std::string>()))
          errors.push_back(at + ": missing required property " + r.dump());
    const nlohmann::json empty = nlohmann::json::object();
    const nlohmann::json& props = s.contains("properties") ? s["properties"] : empty;
    for (const auto& [key, value] : v.items()) {
      if (props.contains(key)) {
        check(props[key], value, child(where, key), errors, depth + 1);
      } else if (s.contains("additionalProperties")) {
        const auto& extra = s["additionalProperties"];
        if (extra.is_boolean()) {
          if (!extra.get<bool>()) errors.push_back(at + ": unexpected property \"" + key + "\"");
        } else {
          check(extra, value, child(where, key), errors, depth + 1);
        }
      }
    }
  }
  if (s.contains("anyOf")) {
    bool any = false;
    for (const auto& alt : s["anyOf"]) {
      std::vector<std::string> sub;
      check(alt, v, where, sub, depth + 1);
      if (sub.empty()) {
        any = true;
        break;
      }
    }
    if (!any) errors.push_back(at + ": matches no alternative of anyOf");
  }
}

}  // namespace ticketscope
