#include "shred/pipeline/json_schema.hpp"

#include "shred/schema_text.hpp"

namespace shred::pipeline {
namespace {

using nlohmann::json;

bool has_type(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "null") return v.is_null();
  return false;
}

void check(const json& v, const json& schema, const std::string& path, std::vector<std::string>& errors) {
  const std::string where = path.empty() ? "/" : path;
  if (auto it = schema.find("type"); it != schema.end() && !has_type(v, it->get<std::string>())) {
    errors.push_back(where + ": expected " + it->get<std::string>());
    return;
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    bool found = false;
    for (const auto& option : *it) found = found || option == v;
    if (!found) errors.push_back(where + ": value " + v.dump() + " is not one of " + it->dump());
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (auto it = schema.find("minimum"); it != schema.end() && x < it->get<double>())
      errors.push_back(where + ": must be >= " + it->dump());
    if (auto it = schema.find("maximum"); it != schema.end() && x > it->get<double>())
      errors.push_back(where + ": must be <= " + it->dump());
    if (auto it = schema.find("exclusiveMinimum"); it != schema.end() && x <= it->get<double>())
      errors.push_back(where + ": must be > " + it->dump());
  }
  if (v.is_array()) {
    if (auto it = schema.find("minItems"); it != schema.end() && v.size() < it->get<std::size_t>())
      errors.push_back(where + ": needs at least " + it->dump() + " items");
    if (auto it = schema.find("maxItems"); it != schema.end() && v.size() > it->get<std::size_t>())
      errors.push_back(where + ": allows at most " + it->dump() + " items");
    if (auto it = schema.find("items"); it != schema.end())
      for (std::size_t i = 0; i < v.size(); ++i) check(v[i], *it, path + "/" + std::to_string(i), errors);
  }
  if (v.is_object()) {
    const json empty = json::object();
    const auto props_it = schema.find("properties");
    const json& props = props_it != schema.end() ? *props_it : empty;
    if (auto it = schema.find("required"); it != schema.end())
      for (const auto& name : *it)
        if (!v.contains(name.get<std::string>()))
          errors.push_back(where + ": missing required field '" + name.get<std::string>() + "'");
    const auto extra = schema.find("additionalProperties");
    const bool closed = extra != schema.end() && extra->is_boolean() && !extra->get<bool>();
    for (const auto& [key, value] : v.items()) {
      if (auto p = props.find(key); p != props.end())
        check(value, *p, path + "/" + key, errors);
      else if (closed)
        errors.push_back(where + ": unknown field '" + key + "'");
    }
  }
}

}  // namespace

std::vector<std::string> validate_schema(const nlohmann::json& instance, const nlohmann::json& schema) {
  std::vector<std::string> errors;
  check(instance, schema, "", errors);
  return errors;
}

const nlohmann::json& experiment_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(detail::kExperimentSchemaText);
  return schema;
}

}  // namespace shred::pipeline
