#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mindkit/errors.hpp"
#include "mindkit/fields.hpp"
#include "mindkit/json_codec.hpp"
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

TEST_CASE("leaves omit the children key") {
    CHECK(tree_to_json(leaf("A")).dump() == R"({"text":"A"})");
}

TEST_CASE("nested schema matches the documented shape") {
    MindNode t = node("R", {leaf("a"), leaf("b")});
    CHECK(tree_to_json(t).dump() ==
          R"({"text":"R","children":[{"text":"a"},{"text":"b"}]})");
}

TEST_CASE("json round trip on seeded random trees") {
    Rng rng(31337);
    for (int i = 0; i < 2000; ++i) {
        MindNode t = test::random_tree(rng, 1 + static_cast<int>(rng.below(40)));
        CHECK(tree_from_json(nlohmann::json::parse(tree_to_json(t).dump())) == t);
    }
}

TEST_CASE("schema violations are rejected") {
    CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"({"text":5})")), SchemaError);
    CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"({"text":"A","extra":1})")),
                    SchemaError);
    CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"({"children":[]})")), SchemaError);
    CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"({"text":"A","children":{}})")),
                    SchemaError);
    CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"(["A"])")), SchemaError);
    CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"({"text":"A","children":[3]})")),
                    SchemaError);
}

TEST_CASE("flatten keys nodes by ancestor text path") {
    FieldMultiset fields = flatten_fields(node("R", {leaf("a"), leaf("b")}));
    REQUIRE(field_count(fields) == 3);
    CHECK(fields.at({"", "R"}) == 1);
    CHECK(fields.at({"R", "a"}) == 1);
    CHECK(fields.at({"R", "b"}) == 1);

    FieldMultiset deep = flatten_fields(node("R", {node("a", {leaf("c")})}));
    CHECK(deep.at({"R/a", "c"}) == 1);
}

TEST_CASE("duplicate fields stay in the multiset") {
    FieldMultiset fields = flatten_fields(node("R", {leaf("a"), leaf("a")}));
    CHECK(fields.at({"R", "a"}) == 2);
    CHECK(field_count(fields) == 3);
}

TEST_CASE("field count equals tree size") {
    Rng rng(4242);
    for (int i = 0; i < 500; ++i) {
        MindNode t = test::random_tree(rng, 1 + static_cast<int>(rng.below(50)));
        CHECK(field_count(flatten_fields(t)) == static_cast<std::size_t>(tree_size(t)));
    }
}

TEST_CASE("field overlap counts multiset intersection") {
    FieldMultiset a = flatten_fields(node("R", {leaf("a"), leaf("a"), leaf("b")}));
    FieldMultiset b = flatten_fields(node("R", {leaf("a"), leaf("c")}));
    CHECK(field_overlap(a, b) == 2); // ("","R") and one ("R","a")
}
