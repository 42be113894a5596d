#pragma once

// Shared test helpers: random trees with markup-hostile texts, synthetic
// geometry for render-free task generation, and an independent tree-edit
// distance oracle.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mindkit/rng.hpp"
#include "mindkit/tokens.hpp"
#include "mindkit/tree.hpp"

namespace mindkit::test {

inline const std::vector<std::string>& hostile_texts() {
    static const std::vector<std::string> pool = {
        "plain",        "a<b",          "x>y",           "A&B",
        "slash/slash",  "&amp;",        "tag<s_text>no", "</s_n1>",
        "digits 123",   "tab\tsep",     "dots...",       "中文节点",
        "思维 导图",     "混合mix词",     "quote\"q",      "back\\slash",
        "trailing ",    " leading",     "",              "<s_n1_1>",
        "emoji and 中文 mixed 42",       "&lt;already&gt;",
    };
    return pool;
}

inline std::string random_text(Rng& rng) {
    std::string text = rng.pick(hostile_texts());
    if (rng.chance(0.5)) text += " " + std::to_string(rng.below(10000));
    return text;
}

/// Uniform-attachment random tree with `size` nodes, no shape caps.
inline MindNode random_tree(Rng& rng, int size) {
    struct Slot {
        std::string text;
        std::vector<int> children;
    };
    std::vector<Slot> arena(static_cast<std::size_t>(size));
    for (auto& slot : arena) slot.text = random_text(rng);
    for (int i = 1; i < size; ++i)
        arena[rng.below(static_cast<std::uint64_t>(i))].children.push_back(i);
    struct Builder {
        const std::vector<Slot>& arena;
        MindNode build(int i) const {
            MindNode node;
            node.text = arena[static_cast<std::size_t>(i)].text;
            for (int c : arena[static_cast<std::size_t>(i)].children)
                node.children.push_back(build(c));
            return node;
        }
    };
    return Builder{arena}.build(0);
}

/// Grid-placed boxes for every node: valid, in-bounds, pairwise disjoint.
/// Stands in for the render stage when tests need geometry without engines.
inline void assign_fake_geometry(MindMap& map) {
    const int n = tree_size(map.root);
    const int cols = std::min(n, 8);
    const int rows = (n + cols - 1) / cols;
    map.image_width = cols * 130 + 20;
    map.image_height = rows * 70 + 20;
    int i = 0;
    visit_with_path(map.root, [&](MindNode& node, const std::string&) {
        const int col = i % cols, row = i / cols;
        node.box = PixelBox{col * 130.0 + 10, row * 70.0 + 10, col * 130.0 + 110,
                            row * 70.0 + 50};
        ++i;
    });
}

// ---------------------------------------------------------------------------
// Tree edit distance oracle: the textbook recursion on ordered forests
// (delete / insert the rightmost root, or match the two rightmost roots).
// With memo = nullptr this is a plain exhaustive recursion; the memo turns it
// into a polynomial check usable on slightly larger trees. Either way the
// code path shares nothing with the keyroot dynamic program under test.

using Forest = std::vector<MindNode>;

inline int forest_node_count(const Forest& forest) {
    int n = 0;
    for (const auto& tree : forest) n += tree_size(tree);
    return n;
}

inline std::string forest_key(const Forest& forest) {
    std::string key;
    for (const auto& tree : forest) key += serialize_tokens(tree);
    return key;
}

inline int ted_oracle_forest(const Forest& a, const Forest& b,
                             std::map<std::string, int>* memo) {
    if (a.empty()) return forest_node_count(b);
    if (b.empty()) return forest_node_count(a);

    std::string key;
    if (memo) {
        key = forest_key(a) + "|" + forest_key(b);
        auto it = memo->find(key);
        if (it != memo->end()) return it->second;
    }

    const MindNode& v = a.back();
    const MindNode& w = b.back();

    Forest a_deleted(a.begin(), a.end() - 1); // v removed, children promoted in place
    a_deleted.insert(a_deleted.end(), v.children.begin(), v.children.end());
    Forest b_deleted(b.begin(), b.end() - 1);
    b_deleted.insert(b_deleted.end(), w.children.begin(), w.children.end());
    Forest a_rest(a.begin(), a.end() - 1); // whole rightmost subtree removed
    Forest b_rest(b.begin(), b.end() - 1);

    const int rename = v.text == w.text ? 0 : 1;
    int best = ted_oracle_forest(a_deleted, b, memo) + 1;
    best = std::min(best, ted_oracle_forest(a, b_deleted, memo) + 1);
    best = std::min(best, ted_oracle_forest(a_rest, b_rest, memo) +
                              ted_oracle_forest(v.children, w.children, memo) + rename);

    if (memo) (*memo)[key] = best;
    return best;
}

inline int ted_oracle(const MindNode& a, const MindNode& b, bool memoized) {
    std::map<std::string, int> memo;
    return ted_oracle_forest({a}, {b}, memoized ? &memo : nullptr);
}

/// Unique scratch directory under the system temp root, removed on scope exit.
struct ScratchDir {
    std::filesystem::path path;

    explicit ScratchDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("mindkit-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

} // namespace mindkit::test
