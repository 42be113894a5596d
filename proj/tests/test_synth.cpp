#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "mindkit/errors.hpp"
#include "mindkit/synth.hpp"
#include "mindkit/utf8.hpp"
#include "support.hpp"

using namespace mindkit;

namespace {

TextCorpus tiny_corpus(int n, Language lang = Language::en) {
    TextCorpus corpus;
    corpus.language = lang;
    for (int i = 0; i < n; ++i) corpus.entries.push_back("word" + std::to_string(i));
    return corpus;
}

int max_child_count(const MindNode& t) {
    int best = static_cast<int>(t.children.size());
    for (const auto& c : t.children) best = std::max(best, max_child_count(c));
    return best;
}

} // namespace

TEST_CASE("tree capacity under the caps") {
    CHECK(max_tree_capacity(1, 6) == 1);
    CHECK(max_tree_capacity(2, 2) == 3);
    CHECK(max_tree_capacity(3, 2) == 7);
    CHECK(max_tree_capacity(5, 6) == 1 + 6 + 36 + 216 + 1296);
}

TEST_CASE("degenerate range gives a single node") {
    SynthConfig cfg;
    cfg.node_count_min = cfg.node_count_max = 1;
    Rng rng(1);
    CHECK(tree_size(sample_tree(cfg, rng)) == 1);
}

TEST_CASE("infeasible request is refused") {
    SynthConfig cfg;
    cfg.max_depth = 2;
    cfg.max_children = 2;
    cfg.node_count_min = cfg.node_count_max = 10; // capacity is 3
    Rng rng(1);
    CHECK_THROWS_AS(sample_tree(cfg, rng), InfeasibleConfig);
}

TEST_CASE("samples respect exact size and both caps") {
    SynthConfig cfg;
    cfg.node_count_min = 5;
    cfg.node_count_max = 40;
    cfg.max_children = 4;
    cfg.max_depth = 4;
    for (int i = 0; i < 500; ++i) {
        Rng rng(derive_seed(2024, static_cast<std::uint64_t>(i)));
        MindNode t = sample_tree(cfg, rng);
        const int n = tree_size(t);
        REQUIRE(n >= 5);
        REQUIRE(n <= 40);
        REQUIRE(tree_depth(t) <= 4);
        REQUIRE(max_child_count(t) <= 4);
    }
}

TEST_CASE("default config reproduces the reported synthetic averages") {
    SynthConfig cfg;
    double nodes = 0, depth = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(7, static_cast<std::uint64_t>(i)));
        MindNode t = sample_tree(cfg, rng);
        nodes += tree_size(t);
        depth += tree_depth(t);
    }
    CHECK(nodes / n == doctest::Approx(16.0).epsilon(0.125)); // 16 +- 2
    CHECK(depth / n == doctest::Approx(4.8).epsilon(0.105));  // 4.8 +- 0.5
}

TEST_CASE("identical seeds give identical trees, texts, styles and DOT") {
    SynthConfig cfg;
    auto generate = [&] {
        Rng rng(99);
        MindNode t = sample_tree(cfg, rng);
        t = sample_texts(std::move(t), tiny_corpus(64), rng);
        StyleSpec style = sample_style(cfg, rng);
        return emit_dot(t, style);
    };
    CHECK(generate() == generate());
}

TEST_CASE("sampled texts are pairwise distinct") {
    SynthConfig cfg;
    TextCorpus corpus = tiny_corpus(40);
    for (int i = 0; i < 300; ++i) {
        Rng rng(derive_seed(5, static_cast<std::uint64_t>(i)));
        MindNode t = sample_texts(sample_tree(cfg, rng), corpus, rng);
        std::set<std::string> seen;
        visit_with_path(t, [&](const MindNode& node, const std::string&) {
            CHECK(seen.insert(node.text).second);
            CHECK_FALSE(node.text.empty());
        });
    }
}

TEST_CASE("texts come from the corpus language") {
    TextCorpus cn;
    cn.language = Language::cn;
    for (const char* w : {"项目", "计划", "研究", "设计", "分析", "目标", "资源", "日程"})
        cn.entries.push_back(w);
    SynthConfig cfg;
    cfg.node_count_min = cfg.node_count_max = 5;
    Rng rng(3);
    MindNode t = sample_texts(sample_tree(cfg, rng), cn, rng);
    visit_with_path(t, [&](const MindNode& node, const std::string&) {
        std::size_t pos = 0;
        while (pos < node.text.size()) {
            char32_t cp = utf8_next(node.text, pos);
            CHECK(cp >= 0x4e00); // CJK unified ideographs only
        }
    });
}

TEST_CASE("small corpus is refused") {
    SynthConfig cfg;
    cfg.node_count_min = cfg.node_count_max = 10;
    Rng rng(1);
    MindNode t = sample_tree(cfg, rng);
    TextCorpus corpus = tiny_corpus(9);
    CHECK_THROWS_AS(sample_texts(std::move(t), corpus, rng), CorpusTooSmall);
}

TEST_CASE("layout engines draw uniformly") {
    SynthConfig cfg;
    std::map<std::string, int> counts;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(11, static_cast<std::uint64_t>(i)));
        counts[sample_style(cfg, rng).engine]++;
    }
    REQUIRE(counts.size() == 6);
    for (const auto& [engine, count] : counts)
        CHECK(std::abs(count / static_cast<double>(n) - 1.0 / 6) < 0.02);
}

TEST_CASE("singleton style space pins every draw") {
    SynthConfig cfg;
    StyleSpace& space = cfg.style_space;
    space.engines = {"dot"};
    space.node_shapes = {"box"};
    space.node_styles = {"filled"};
    space.fill_colors = {"white"};
    space.font_names = {"Courier"};
    space.edge_styles = {"solid"};
    space.edge_colors = {"black"};
    space.arrowheads = {"vee"};
    space.rankdirs = {"LR"};
    space.bg_colors = {"white"};
    space.font_size_range = {12, 12};
    space.nodesep_range = {0.5, 0.5};
    space.ranksep_range = {0.5, 0.5};
    Rng a(1), b(2);
    CHECK(sample_style(cfg, a) == sample_style(cfg, b));
}

TEST_CASE("single-node DOT has the path id, the label and no edges") {
    MindNode t;
    t.text = "A";
    SynthConfig cfg;
    Rng rng(4);
    std::string dot = emit_dot(t, sample_style(cfg, rng));
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("n1 [label=\"A\"]") != std::string::npos);
    CHECK(dot.find("->") == std::string::npos);
}

TEST_CASE("edge count equals node count minus one") {
    SynthConfig cfg;
    for (int i = 0; i < 100; ++i) {
        Rng rng(derive_seed(31, static_cast<std::uint64_t>(i)));
        MindNode t = sample_texts(sample_tree(cfg, rng), tiny_corpus(64), rng);
        std::string dot = emit_dot(t, sample_style(cfg, rng));
        int arrows = 0;
        for (std::size_t pos = 0; (pos = dot.find("->", pos)) != std::string::npos; pos += 2)
            ++arrows;
        CHECK(arrows == tree_size(t) - 1);
    }
}

TEST_CASE("DOT labels escape quotes and backslashes") {
    CHECK(escape_dot_label("say \"hi\"") == "say \\\"hi\\\"");
    CHECK(escape_dot_label("a\\b") == "a\\\\b");
}
