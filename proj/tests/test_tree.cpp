#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mindkit/errors.hpp"
#include "mindkit/tree.hpp"
#include "support.hpp"

using namespace mindkit;

namespace {

MindNode leaf(std::string text) {
    MindNode n;
    n.text = std::move(text);
    return n;
}

MindNode node(std::string text, std::vector<MindNode> children) {
    MindNode n;
    n.text = std::move(text);
    n.children = std::move(children);
    return n;
}

} // namespace

TEST_CASE("size and depth of the documented examples") {
    CHECK(tree_size(leaf("A")) == 1);
    CHECK(tree_depth(leaf("A")) == 1);
    MindNode t = node("R", {node("a", {leaf("c")}), leaf("b")});
    CHECK(tree_size(t) == 4);
    CHECK(tree_depth(t) == 3);
}

TEST_CASE("subtree lookup is first-preorder-match") {
    MindNode t = node("R", {node("a", {leaf("c")}), leaf("b")});
    SubtreeMatch m = find_subtree(t, "a");
    CHECK(*m.node == node("a", {leaf("c")}));
    CHECK_FALSE(m.ambiguous);

    CHECK(*find_subtree(t, "R").node == t); // whole tree
    CHECK_THROWS_AS(find_subtree(t, "zzz"), NotFound);
}

TEST_CASE("duplicate theme sets the ambiguity flag and returns the first match") {
    MindNode t = node("R", {node("dup", {leaf("x")}), leaf("dup")});
    SubtreeMatch m = find_subtree(t, "dup");
    CHECK(m.ambiguous);
    CHECK(m.node->children.size() == 1); // preorder-first is the one with the child
}

TEST_CASE("hierarchical paths enumerate in preorder") {
    MindNode t = node("R", {node("a", {leaf("c")}), leaf("b")});
    std::vector<std::string> paths;
    visit_with_path(t, [&](const MindNode&, const std::string& p) { paths.push_back(p); });
    CHECK(paths == std::vector<std::string>{"1", "1_1", "1_1_1", "1_2"});
}

TEST_CASE("equality ignores geometry") {
    MindNode a = leaf("A");
    MindNode b = leaf("A");
    b.box = PixelBox{1, 2, 3, 4};
    CHECK(a == b);
    CHECK_FALSE(has_full_geometry(a));
    CHECK(has_full_geometry(b));
}

TEST_CASE("geometry must cover every node to count as full") {
    MindNode t = node("R", {leaf("a")});
    t.box = PixelBox{0, 0, 1, 1};
    CHECK_FALSE(has_full_geometry(t));
    t.children[0].box = PixelBox{0, 0, 1, 1};
    CHECK(has_full_geometry(t));
}

TEST_CASE("depth equals longest root-to-leaf node count on random trees") {
    Rng rng(777);
    for (int i = 0; i < 200; ++i) {
        MindNode t = test::random_tree(rng, 1 + static_cast<int>(rng.below(30)));
        // chains: depth bounded by size; singletons: exactly 1
        CHECK(tree_depth(t) >= 1);
        CHECK(tree_depth(t) <= tree_size(t));
    }
}
