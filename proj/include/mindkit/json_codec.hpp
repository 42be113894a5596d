#pragma once

#include <json.hpp>

#include "mindkit/tree.hpp"

namespace mindkit {

// Canonical nested JSON schema: {"text": <string>, "children": [<node>, ...]},
// the children key omitted for leaves.

nlohmann::ordered_json tree_to_json(const MindNode& tree);

/// Throws SchemaError on unknown keys or wrong types.
MindNode tree_from_json(const nlohmann::json& value);

} // namespace mindkit
