#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace shred::pipeline {

/// Validates `instance` against the subset of JSON Schema used by the
/// experiment config: type, enum, properties, required,
/// additionalProperties (boolean), items, minItems, maxItems, minimum,
/// maximum, exclusiveMinimum. Returns one message per violation, each
/// prefixed with a JSON-pointer-like path.
std::vector<std::string> validate_schema(const nlohmann::json& instance, const nlohmann::json& schema);

/// The experiment config schema shipped in schema/experiment_config.schema.json.
const nlohmann::json& experiment_schema();

}  // namespace shred::pipeline
