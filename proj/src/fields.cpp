#include "mindkit/fields.hpp"

#include <algorithm>

namespace mindkit {

namespace {

void flatten(const MindNode& node, const std::string& key, FieldMultiset& out) {
    ++out[{key, node.text}];
    const std::string child_key = key.empty() ? node.text : key + "/" + node.text;
    for (const auto& child : node.children) flatten(child, child_key, out);
}

} // namespace

FieldMultiset flatten_fields(const MindNode& tree) {
    FieldMultiset out;
    flatten(tree, "", out);
    return out;
}

std::size_t field_count(const FieldMultiset& fields) {
    std::size_t n = 0;
    for (const auto& [field, mult] : fields) n += static_cast<std::size_t>(mult);
    return n;
}

std::size_t field_overlap(const FieldMultiset& a, const FieldMultiset& b) {
    std::size_t n = 0;
    for (const auto& [field, mult] : a) {
        auto it = b.find(field);
        if (it != b.end()) n += static_cast<std::size_t>(std::min(mult, it->second));
    }
    return n;
}

} // namespace mindkit
