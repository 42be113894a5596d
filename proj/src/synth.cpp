#include "mindkit/synth.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mindkit/errors.hpp"

namespace mindkit {

const std::vector<std::string> kLayoutEngines = {"dot",   "neato", "twopi",
                                                 "circo", "fdp",   "sfdp"};

StyleSpace StyleSpace::defaults() {
    StyleSpace s;
    s.node_shapes = {"box", "ellipse", "oval", "note", "folder", "tab", "component", "box3d"};
    s.node_styles = {"filled", "filled,rounded", "filled,bold"};
    s.fill_colors = {"lightblue",  "lightyellow", "lightpink", "palegreen",
                     "lavender",   "peachpuff",   "azure",     "honeydew",
                     "mistyrose",  "aliceblue",   "cornsilk",  "white"};
    s.font_names = {"Helvetica", "Courier", "Times", "Arial"};
    s.edge_styles = {"solid", "dashed", "dotted", "bold"};
    s.edge_colors = {"black", "gray40", "steelblue", "darkgreen", "brown"};
    s.arrowheads = {"normal", "vee", "none", "diamond", "dot"};
    s.rankdirs = {"TB", "LR", "BT", "RL"};
    s.bg_colors = {"white", "ivory", "whitesmoke", "seashell", "mintcream"};
    return s;
}

bool operator==(const StyleSpec& a, const StyleSpec& b) {
    return a.engine == b.engine && a.node_shape == b.node_shape && a.node_style == b.node_style &&
           a.fill_color == b.fill_color && a.font_name == b.font_name &&
           a.edge_style == b.edge_style && a.edge_color == b.edge_color &&
           a.arrowhead == b.arrowhead && a.rankdir == b.rankdir && a.bg_color == b.bg_color &&
           a.font_size == b.font_size && a.nodesep == b.nodesep && a.ranksep == b.ranksep;
}

TextCorpus load_corpus(const std::filesystem::path& path, Language lang) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus: " + path.string());
    TextCorpus corpus;
    corpus.language = lang;
    std::string line;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && seen.insert(line).second) corpus.entries.push_back(line);
    }
    if (corpus.entries.empty()) throw IoError("empty corpus: " + path.string());
    return corpus;
}

std::uint64_t max_tree_capacity(int max_depth, int max_children) {
    const std::uint64_t cap = 1'000'000'000ULL;
    std::uint64_t total = 0, level = 1;
    for (int d = 0; d < max_depth; ++d) {
        total += level;
        if (total >= cap) return cap;
        if (level > cap / static_cast<std::uint64_t>(max_children)) return cap;
        level *= static_cast<std::uint64_t>(max_children);
    }
    return total;
}

namespace {

struct GrowNode {
    int depth;       // 1-based
    int parent;      // index into arena, -1 for root
    int child_count = 0;
};

MindNode materialize(const std::vector<GrowNode>& arena,
                     const std::vector<std::vector<int>>& children, int index) {
    MindNode node;
    for (int c : children[index]) node.children.push_back(materialize(arena, children, c));
    return node;
}

} // namespace

MindNode sample_tree(const SynthConfig& config, Rng& rng) {
    if (config.node_count_min < 1 || config.node_count_min > config.node_count_max)
        throw InfeasibleConfig("node_count_range must satisfy 1 <= min <= max");
    if (config.max_children < 1 || config.max_depth < 1)
        throw InfeasibleConfig("max_children and max_depth must be >= 1");

    const int n = rng.range(config.node_count_min, config.node_count_max);
    if (static_cast<std::uint64_t>(n) > max_tree_capacity(config.max_depth, config.max_children)) {
        throw InfeasibleConfig("requested " + std::to_string(n) + " nodes but capacity is " +
                               std::to_string(max_tree_capacity(config.max_depth,
                                                                config.max_children)));
    }

    std::vector<GrowNode> arena;
    arena.push_back({1, -1});
    std::vector<int> eligible; // nodes that can still take a child
    if (config.max_depth > 1) eligible.push_back(0);

    for (int added = 1; added < n; ++added) {
        int slot = static_cast<int>(rng.below(eligible.size()));
        int parent = eligible[slot];
        arena.push_back({arena[parent].depth + 1, parent});
        int child = static_cast<int>(arena.size()) - 1;
        if (++arena[parent].child_count >= config.max_children) {
            eligible[slot] = eligible.back();
            eligible.pop_back();
        }
        if (arena[child].depth < config.max_depth) eligible.push_back(child);
    }

    std::vector<std::vector<int>> children(arena.size());
    for (int i = 1; i < static_cast<int>(arena.size()); ++i)
        children[arena[i].parent].push_back(i);
    return materialize(arena, children, 0);
}

MindNode sample_texts(MindNode tree, const TextCorpus& corpus, Rng& rng) {
    const int n = tree_size(tree);
    if (static_cast<int>(corpus.entries.size()) < n)
        throw CorpusTooSmall("corpus has " + std::to_string(corpus.entries.size()) +
                             " entries for a " + std::to_string(n) + "-node tree");

    const char* joiner = corpus.language == Language::cn ? "" : " ";
    std::set<std::string> used;

    // Fallback pool: distinct single entries. load_corpus dedupes, so with
    // entries >= node count a scan always finds an unused one.
    std::vector<int> pool(corpus.entries.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);
    rng.shuffle(pool);

    visit_with_path(tree, [&](MindNode& node, const std::string&) {
        std::string text;
        for (int attempt = 0; attempt < 64; ++attempt) {
            int parts = rng.range(1, 3);
            text.clear();
            for (int p = 0; p < parts; ++p) {
                if (p > 0) text += joiner;
                text += rng.pick(corpus.entries);
            }
            if (!used.count(text)) break;
            text.clear();
        }
        if (text.empty() || used.count(text)) {
            for (int idx : pool) {
                const std::string& candidate = corpus.entries[idx];
                if (!used.count(candidate)) {
                    text = candidate;
                    break;
                }
            }
        }
        used.insert(text);
        node.text = std::move(text);
    });
    return tree;
}

StyleSpec sample_style(const SynthConfig& config, Rng& rng) {
    const StyleSpace& space = config.style_space;
    StyleSpec s;
    s.engine = rng.pick(space.engines);
    s.node_shape = rng.pick(space.node_shapes);
    s.node_style = rng.pick(space.node_styles);
    s.fill_color = rng.pick(space.fill_colors);
    s.font_name = rng.pick(space.font_names);
    s.edge_style = rng.pick(space.edge_styles);
    s.edge_color = rng.pick(space.edge_colors);
    s.arrowhead = rng.pick(space.arrowheads);
    s.rankdir = rng.pick(space.rankdirs);
    s.bg_color = rng.pick(space.bg_colors);
    s.font_size = rng.range(space.font_size_range.first, space.font_size_range.second);
    s.nodesep = rng.real(space.nodesep_range.first, space.nodesep_range.second);
    s.ranksep = rng.real(space.ranksep_range.first, space.ranksep_range.second);
    return s;
}

std::string escape_dot_label(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string emit_dot(const MindNode& tree, const StyleSpec& style) {
    std::ostringstream dot;
    dot.imbue(std::locale::classic());
    dot << "digraph mindmap {\n";
    dot << "  graph [rankdir=" << style.rankdir << ", bgcolor=\"" << style.bg_color
        << "\", nodesep=" << style.nodesep << ", ranksep=" << style.ranksep
        << ", pad=\"0\"];\n";
    dot << "  node [shape=" << style.node_shape << ", style=\"" << style.node_style
        << "\", fillcolor=\"" << style.fill_color << "\", fontname=\"" << style.font_name
        << "\", fontsize=" << style.font_size << "];\n";
    dot << "  edge [style=" << style.edge_style << ", color=\"" << style.edge_color
        << "\", arrowhead=" << style.arrowhead << "];\n";
    visit_with_path(tree, [&](const MindNode& node, const std::string& path) {
        dot << "  n" << path << " [label=\"" << escape_dot_label(node.text) << "\"];\n";
    });
    visit_with_path(tree, [&](const MindNode& node, const std::string& path) {
        for (std::size_t i = 0; i < node.children.size(); ++i)
            dot << "  n" << path << " -> n" << path << "_" << (i + 1) << ";\n";
    });
    dot << "}\n";
    return dot.str();
}

} // namespace mindkit
