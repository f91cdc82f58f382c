#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace fgdm {

/// Checks an instance against the subset of JSON Schema used by the agent
/// payload schemas: type (string or array of names), required, properties,
/// additionalProperties (boolean), items, enum, minimum, minItems and
/// minLength. Unknown keywords are ignored.
///
/// Returns one "<json pointer>: <problem>" entry per violation; empty means
/// the instance conforms.
std::vector<std::string> schema_violations(const nlohmann::json& schema,
                                           const nlohmann::json& instance);

}  // namespace fgdm
