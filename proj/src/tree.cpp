#include "mindkit/tree.hpp"

#include <algorithm>

#include "mindkit/errors.hpp"

namespace mindkit {

std::string to_string(Language lang) { return lang == Language::en ? "en" : "cn"; }

std::string to_string(MapSource src) {
    return src == MapSource::synthetic ? "synthetic" : "ingested";
}

Language language_from_string(std::string_view s) {
    if (s == "en" || s == "EN") return Language::en;
    if (s == "cn" || s == "CN") return Language::cn;
    throw SchemaError("unknown language: " + std::string(s));
}

MapSource source_from_string(std::string_view s) {
    if (s == "synthetic") return MapSource::synthetic;
    if (s == "ingested") return MapSource::ingested;
    throw SchemaError("unknown source: " + std::string(s));
}

bool operator==(const PixelBox& a, const PixelBox& b) {
    return a.x1 == b.x1 && a.y1 == b.y1 && a.x2 == b.x2 && a.y2 == b.y2;
}

bool operator==(const NormBox& a, const NormBox& b) {
    return a.x1 == b.x1 && a.y1 == b.y1 && a.x2 == b.x2 && a.y2 == b.y2;
}

bool operator==(const MindNode& a, const MindNode& b) {
    if (a.text != b.text || a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!(a.children[i] == b.children[i])) return false;
    return true;
}

int tree_size(const MindNode& tree) {
    int n = 1;
    for (const auto& child : tree.children) n += tree_size(child);
    return n;
}

int tree_depth(const MindNode& tree) {
    int deepest = 0;
    for (const auto& child : tree.children) deepest = std::max(deepest, tree_depth(child));
    return 1 + deepest;
}

namespace {

void collect_matches(const MindNode& node, std::string_view theme,
                     std::vector<const MindNode*>& out) {
    if (node.text == theme) out.push_back(&node);
    for (const auto& child : node.children) collect_matches(child, theme, out);
}

} // namespace

SubtreeMatch find_subtree(const MindNode& root, std::string_view theme) {
    std::vector<const MindNode*> matches;
    collect_matches(root, theme, matches);
    if (matches.empty()) throw NotFound("no node with theme: " + std::string(theme));
    return {matches.front(), matches.size() > 1};
}

namespace {

template <class Node, class Fn>
void walk(Node& node, std::string& path, const Fn& fn) {
    fn(node, path);
    std::size_t base = path.size();
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        path += '_';
        path += std::to_string(i + 1);
        walk(node.children[i], path, fn);
        path.resize(base);
    }
}

} // namespace

void visit_with_path(const MindNode& root,
                     const std::function<void(const MindNode&, const std::string&)>& fn) {
    std::string path = "1";
    walk(root, path, fn);
}

void visit_with_path(MindNode& root,
                     const std::function<void(MindNode&, const std::string&)>& fn) {
    std::string path = "1";
    walk(root, path, fn);
}

bool has_full_geometry(const MindNode& root) {
    if (!root.box) return false;
    for (const auto& child : root.children)
        if (!has_full_geometry(child)) return false;
    return true;
}

} // namespace mindkit
