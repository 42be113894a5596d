#include "mindkit/json_codec.hpp"

#include "mindkit/errors.hpp"

namespace mindkit {

nlohmann::ordered_json tree_to_json(const MindNode& tree) {
    nlohmann::ordered_json j;
    j["text"] = tree.text;
    if (!tree.children.empty()) {
        auto& arr = j["children"] = nlohmann::ordered_json::array();
        for (const auto& child : tree.children) arr.push_back(tree_to_json(child));
    }
    return j;
}

MindNode tree_from_json(const nlohmann::json& value) {
    if (!value.is_object()) throw SchemaError("node must be a JSON object");
    MindNode node;
    bool saw_text = false;
    for (const auto& [key, val] : value.items()) {
        if (key == "text") {
            if (!val.is_string()) throw SchemaError("\"text\" must be a string");
            node.text = val.get<std::string>();
            saw_text = true;
        } else if (key == "children") {
            if (!val.is_array()) throw SchemaError("\"children\" must be an array");
            for (const auto& child : val) node.children.push_back(tree_from_json(child));
        } else {
            throw SchemaError("unknown key: " + key);
        }
    }
    if (!saw_text) throw SchemaError("node missing \"text\"");
    return node;
}

} // namespace mindkit
