// Deterministic stand-in for the Graphviz layout engines, exposing the same
// command-line surface the render pipeline uses:
//
//   <engine> -Tplain file.dot
//   <engine> -Tpng -Gdpi=96 -o out.png file.dot
//
// The engine is chosen by the executable basename (dot, neato, twopi, circo,
// fdp, sfdp; -K<engine> overrides). Layout quality is not the point: output
// geometry is valid, non-overlapping where the real engine would keep nodes
// apart, consistent between the plain and png passes, and stable across runs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mindkit/image.hpp"
#include "mindkit/rng.hpp"
#include "mindkit/utf8.hpp"

namespace {

using mindkit::Image;

struct DotNode {
    std::string id;
    std::map<std::string, std::string> attrs;
};

struct DotGraph {
    std::vector<DotNode> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    std::map<std::string, std::string> graph_attrs, node_defaults, edge_defaults;

    const std::string& attr(const DotNode& n, const std::string& key,
                            const std::string& fallback) const {
        auto it = n.attrs.find(key);
        if (it != n.attrs.end()) return it->second;
        it = node_defaults.find(key);
        if (it != node_defaults.end()) return it->second;
        static thread_local std::string fb;
        fb = fallback;
        return fb;
    }
};

[[noreturn]] void die(const std::string& msg) {
    std::cerr << "mock-graphviz: " << msg << "\n";
    std::exit(1);
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::map<std::string, std::string> parse_attrs(const std::string& body) {
    std::map<std::string, std::string> attrs;
    std::size_t i = 0;
    while (i < body.size()) {
        while (i < body.size() && (body[i] == ' ' || body[i] == ',' || body[i] == '\t')) ++i;
        std::size_t eq = body.find('=', i);
        if (eq == std::string::npos) break;
        std::string key = strip(body.substr(i, eq - i));
        i = eq + 1;
        while (i < body.size() && body[i] == ' ') ++i;
        std::string value;
        if (i < body.size() && body[i] == '"') {
            ++i;
            while (i < body.size() && body[i] != '"') {
                if (body[i] == '\\' && i + 1 < body.size()) ++i;
                value.push_back(body[i++]);
            }
            if (i < body.size()) ++i;
        } else {
            while (i < body.size() && body[i] != ',' && body[i] != ' ' && body[i] != ']')
                value.push_back(body[i++]);
        }
        if (!key.empty()) attrs[key] = value;
    }
    return attrs;
}

DotGraph parse_dot(const std::string& text) {
    DotGraph g;
    std::map<std::string, std::size_t> index;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = strip(line);
        if (line.empty() || line == "}" || line.rfind("digraph", 0) == 0 ||
            line.rfind("graph {", 0) == 0 || line.rfind("//", 0) == 0)
            continue;
        if (!line.empty() && line.back() == ';') line.pop_back();

        std::map<std::string, std::string> attrs;
        std::string head = line;
        std::size_t open = line.find('[');
        if (open != std::string::npos) {
            std::size_t close = line.rfind(']');
            if (close == std::string::npos || close < open) die("unterminated attribute list");
            attrs = parse_attrs(line.substr(open + 1, close - open - 1));
            head = strip(line.substr(0, open));
        }

        if (head == "graph") {
            g.graph_attrs.insert(attrs.begin(), attrs.end());
        } else if (head == "node") {
            g.node_defaults.insert(attrs.begin(), attrs.end());
        } else if (head == "edge") {
            g.edge_defaults.insert(attrs.begin(), attrs.end());
        } else if (head.find("->") != std::string::npos) {
            std::size_t arrow = head.find("->");
            std::string a = strip(head.substr(0, arrow));
            std::string b = strip(head.substr(arrow + 2));
            if (a.empty() || b.empty()) die("malformed edge: " + line);
            g.edges.emplace_back(a, b);
            for (const auto& id : {a, b}) {
                if (!index.count(id)) {
                    index[id] = g.nodes.size();
                    g.nodes.push_back({id, {}});
                }
            }
        } else if (!head.empty()) {
            if (index.count(head)) {
                g.nodes[index[head]].attrs.insert(attrs.begin(), attrs.end());
            } else {
                index[head] = g.nodes.size();
                g.nodes.push_back({head, attrs});
            }
        }
    }
    if (g.nodes.empty()) die("graph has no nodes");
    return g;
}

// Label extent in "character units": CJK and other wide code points count
// as 5/3 of an ASCII column.
double label_units(const std::string& label) {
    double units = 0;
    std::size_t pos = 0;
    while (pos < label.size()) {
        char32_t cp = mindkit::utf8_next(label, pos);
        units += cp >= 0x1100 ? 5.0 / 3.0 : 1.0;
    }
    return std::max(units, 1.0);
}

struct Placed {
    double cx = 0, cy = 0, w = 0, h = 0; // inches, top-left-origin working frame
    std::string label;
};

double jitter(const std::string& salt, const std::string& id, double amplitude) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : salt) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    for (char c : id) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    return (static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5) * 2.0 * amplitude;
}

struct Layout {
    std::vector<Placed> placed; // parallel to graph.nodes
    double width = 0, height = 0;
};

Layout run_layout(const DotGraph& g, const std::string& engine) {
    const double nodesep = g.graph_attrs.count("nodesep") ? std::stod(g.graph_attrs.at("nodesep")) : 0.25;
    const double ranksep = g.graph_attrs.count("ranksep") ? std::stod(g.graph_attrs.at("ranksep")) : 0.5;
    const std::string rankdir =
        g.graph_attrs.count("rankdir") ? g.graph_attrs.at("rankdir") : "TB";

    const std::size_t n = g.nodes.size();
    Layout out;
    out.placed.resize(n);

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[g.nodes[i].id] = i;

    double max_w = 0, max_h = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const DotNode& node = g.nodes[i];
        Placed& p = out.placed[i];
        p.label = g.attr(node, "label", node.id);
        double fontsize = std::stod(g.attr(node, "fontsize", "14"));
        p.w = 0.25 + label_units(p.label) * 0.60 * fontsize / 72.0;
        p.h = std::max(0.36, fontsize * 1.40 / 72.0 + 0.16);
        max_w = std::max(max_w, p.w);
        max_h = std::max(max_h, p.h);
    }

    // Depth from the first node via edges (our DOT always lists a tree).
    std::vector<int> depth(n, 0);
    std::vector<std::vector<std::size_t>> by_depth;
    {
        std::vector<char> has_parent(n, 0);
        for (const auto& [a, b] : g.edges) has_parent[index[b]] = 1;
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < n; ++i)
            if (!has_parent[i]) order.push_back(i);
        if (order.empty()) order.push_back(0);
        std::vector<char> seen(n, 0);
        for (std::size_t i : order) seen[i] = 1;
        for (std::size_t head = 0; head < order.size(); ++head) {
            std::size_t u = order[head];
            for (const auto& [a, b] : g.edges) {
                if (index[a] == u && !seen[index[b]]) {
                    seen[index[b]] = 1;
                    depth[index[b]] = depth[u] + 1;
                    order.push_back(index[b]);
                }
            }
        }
        int max_depth = 0;
        for (std::size_t i = 0; i < n; ++i) max_depth = std::max(max_depth, depth[i]);
        by_depth.resize(static_cast<std::size_t>(max_depth) + 1);
        for (std::size_t i = 0; i < n; ++i) by_depth[static_cast<std::size_t>(depth[i])].push_back(i);
    }

    if (engine == "dot") {
        double y = 0;
        for (std::size_t d = 0; d < by_depth.size(); ++d) {
            double layer_h = 0, x = 0;
            for (std::size_t i : by_depth[d]) layer_h = std::max(layer_h, out.placed[i].h);
            y += layer_h / 2;
            for (std::size_t i : by_depth[d]) {
                Placed& p = out.placed[i];
                x += p.w / 2;
                p.cx = x;
                p.cy = y;
                x += p.w / 2 + nodesep;
            }
            y += layer_h / 2 + ranksep;
        }
        if (rankdir == "BT" || rankdir == "RL") {
            double total = y;
            for (auto& p : out.placed) p.cy = total - p.cy;
        }
        if (rankdir == "LR" || rankdir == "RL") {
            for (auto& p : out.placed) std::swap(p.cx, p.cy);
        }
    } else if (engine == "twopi" || engine == "circo") {
        const double two_pi = 6.283185307179586;
        if (engine == "circo") {
            double radius = std::max(1.0, static_cast<double>(n) * (max_w + nodesep) / two_pi);
            for (std::size_t i = 0; i < n; ++i) {
                double angle = two_pi * static_cast<double>(i) / static_cast<double>(n);
                out.placed[i].cx = radius * std::cos(angle);
                out.placed[i].cy = radius * std::sin(angle);
            }
        } else {
            for (std::size_t d = 0; d < by_depth.size(); ++d) {
                const auto& ring = by_depth[d];
                double radius =
                    d == 0 ? 0.0
                           : std::max(static_cast<double>(d) * (max_w + ranksep),
                                      static_cast<double>(ring.size()) * (max_w + nodesep) / two_pi);
                for (std::size_t k = 0; k < ring.size(); ++k) {
                    double angle = two_pi * static_cast<double>(k) / std::max<std::size_t>(ring.size(), 1);
                    out.placed[ring[k]].cx = radius * std::cos(angle);
                    out.placed[ring[k]].cy = radius * std::sin(angle);
                }
            }
        }
    } else { // neato, fdp, sfdp: jittered grid scatter
        std::size_t cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
        double cell_w = max_w + nodesep;
        double cell_h = max_h + std::max(nodesep, ranksep * 0.5);
        double amp_x = nodesep * 0.45, amp_y = std::max(nodesep, ranksep * 0.5) * 0.45;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t row = i / cols, col = i % cols;
            // stagger odd rows so the result does not look rank-aligned
            double stagger = (row % 2 == 1) ? cell_w * 0.5 : 0.0;
            out.placed[i].cx = static_cast<double>(col) * cell_w + stagger +
                               jitter(engine, g.nodes[i].id, amp_x);
            out.placed[i].cy =
                static_cast<double>(row) * cell_h + jitter(engine + "y", g.nodes[i].id, amp_y);
        }
    }

    // Shift into the positive quadrant with a small margin and set extents.
    const double margin = 0.04;
    double min_x = 1e30, min_y = 1e30, max_x = -1e30, max_y = -1e30;
    for (const auto& p : out.placed) {
        min_x = std::min(min_x, p.cx - p.w / 2);
        max_x = std::max(max_x, p.cx + p.w / 2);
        min_y = std::min(min_y, p.cy - p.h / 2);
        max_y = std::max(max_y, p.cy + p.h / 2);
    }
    for (auto& p : out.placed) {
        p.cx += margin - min_x;
        p.cy += margin - min_y;
    }
    out.width = (max_x - min_x) + 2 * margin;
    out.height = (max_y - min_y) + 2 * margin;
    return out;
}

std::string quote_plain(const std::string& s) {
    bool needs = s.empty();
    for (char c : s)
        if (c == ' ' || c == '"' || c == '\t') needs = true;
    if (!needs) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void emit_plain(const DotGraph& g, const Layout& layout) {
    std::printf("graph 1 %.5f %.5f\n", layout.width, layout.height);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const Placed& p = layout.placed[i];
        // plain output is bottom-left origin
        std::printf("node %s %.5f %.5f %.5f %.5f %s solid %s black %s\n",
                    quote_plain(g.nodes[i].id).c_str(), p.cx, layout.height - p.cy, p.w, p.h,
                    quote_plain(p.label).c_str(),
                    g.attr(g.nodes[i], "shape", "ellipse").c_str(),
                    g.attr(g.nodes[i], "fillcolor", "lightgrey").c_str());
    }
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) index[g.nodes[i].id] = i;
    for (const auto& [a, b] : g.edges) {
        const Placed& pa = layout.placed[index[a]];
        const Placed& pb = layout.placed[index[b]];
        std::printf("edge %s %s 2 %.5f %.5f %.5f %.5f solid black\n", quote_plain(a).c_str(),
                    quote_plain(b).c_str(), pa.cx, layout.height - pa.cy, pb.cx,
                    layout.height - pb.cy);
    }
    std::printf("stop\n");
}

struct Rgb {
    std::uint8_t r, g, b;
};

Rgb color_from_name(const std::string& name) {
    static const std::map<std::string, Rgb> table = {
        {"white", {255, 255, 255}},   {"ivory", {255, 255, 240}},
        {"whitesmoke", {245, 245, 245}}, {"seashell", {255, 245, 238}},
        {"mintcream", {245, 255, 250}}, {"lightblue", {173, 216, 230}},
        {"lightyellow", {255, 255, 224}}, {"lightpink", {255, 182, 193}},
        {"palegreen", {152, 251, 152}}, {"lavender", {230, 230, 250}},
        {"peachpuff", {255, 218, 185}}, {"azure", {240, 255, 255}},
        {"honeydew", {240, 255, 240}}, {"mistyrose", {255, 228, 225}},
        {"aliceblue", {240, 248, 255}}, {"cornsilk", {255, 248, 220}},
        {"black", {0, 0, 0}},          {"gray40", {102, 102, 102}},
        {"steelblue", {70, 130, 180}}, {"darkgreen", {0, 100, 0}},
        {"brown", {165, 42, 42}},      {"lightgrey", {211, 211, 211}},
    };
    auto it = table.find(name);
    if (it != table.end()) return it->second;
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : name) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    return {static_cast<std::uint8_t>(170 + h % 64), static_cast<std::uint8_t>(170 + (h >> 8) % 64),
            static_cast<std::uint8_t>(170 + (h >> 16) % 64)};
}

void emit_png(const DotGraph& g, const Layout& layout, int dpi, const std::string& path) {
    int w = std::max(1, static_cast<int>(std::lround(layout.width * dpi)));
    int h = std::max(1, static_cast<int>(std::lround(layout.height * dpi)));
    std::string bg_name =
        g.graph_attrs.count("bgcolor") ? g.graph_attrs.at("bgcolor") : "white";
    Rgb bg = color_from_name(bg_name);
    Image image(w, h, bg.r, bg.g, bg.b);

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) index[g.nodes[i].id] = i;
    Rgb edge_color = color_from_name(
        g.edge_defaults.count("color") ? g.edge_defaults.at("color") : "black");
    for (const auto& [a, b] : g.edges) {
        const Placed& pa = layout.placed[index[a]];
        const Placed& pb = layout.placed[index[b]];
        mindkit::draw_line(image, static_cast<int>(pa.cx * dpi), static_cast<int>(pa.cy * dpi),
                           static_cast<int>(pb.cx * dpi), static_cast<int>(pb.cy * dpi),
                           edge_color.r, edge_color.g, edge_color.b);
    }
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const Placed& p = layout.placed[i];
        Rgb fill = color_from_name(g.attr(g.nodes[i], "fillcolor", "lightgrey"));
        int x1 = static_cast<int>((p.cx - p.w / 2) * dpi);
        int y1 = static_cast<int>((p.cy - p.h / 2) * dpi);
        int x2 = static_cast<int>((p.cx + p.w / 2) * dpi);
        int y2 = static_cast<int>((p.cy + p.h / 2) * dpi);
        mindkit::fill_rect(image, x1, y1, x2, y2, fill.r, fill.g, fill.b);
        mindkit::draw_rect_border(image, x1, y1, x2, y2, 40, 40, 40);
        // glyph placeholder strokes so noise/compositing act on non-flat pixels
        for (int tx = x1 + 4; tx < x2 - 4; tx += 5)
            mindkit::draw_line(image, tx, y1 + 4, tx, std::min(y1 + 8, y2 - 2), 60, 60, 60);
    }
    mindkit::save_png(image, path);
}

} // namespace

int main(int argc, char** argv) {
    std::string engine = std::filesystem::path(argv[0]).filename().string();
    std::string format;
    std::string out_path;
    std::string input_path;
    int dpi = 96;

    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg.rfind("-T", 0) == 0) {
            format = arg.substr(2);
        } else if (arg.rfind("-K", 0) == 0) {
            engine = arg.substr(2);
        } else if (arg.rfind("-Gdpi=", 0) == 0) {
            dpi = std::stoi(arg.substr(6));
        } else if (arg.rfind("-G", 0) == 0) {
            // other graph attribute overrides are accepted and ignored
        } else if (arg == "-o") {
            if (++i >= argc) die("-o requires a path");
            out_path = argv[i];
        } else if (arg.rfind("-o", 0) == 0) {
            out_path = arg.substr(2);
        } else if (arg == "-V") {
            std::cerr << "mock-graphviz layout stub (engine " << engine << ")\n";
            return 0;
        } else if (!arg.empty() && arg[0] != '-') {
            input_path = arg;
        } else {
            die("unknown option: " + arg);
        }
    }

    bool known = false;
    for (const char* name : {"dot", "neato", "twopi", "circo", "fdp", "sfdp"})
        if (engine == name) known = true;
    if (!known) die("unknown engine: " + engine);
    if (format.empty()) die("no -T format given");
    if (input_path.empty()) die("no input file given");

    std::ifstream in(input_path, std::ios::binary);
    if (!in) die("cannot open " + input_path);
    std::stringstream buf;
    buf << in.rdbuf();

    DotGraph graph = parse_dot(buf.str());
    Layout layout = run_layout(graph, engine);

    if (format == "plain") {
        emit_plain(graph, layout);
    } else if (format == "png") {
        if (out_path.empty()) die("-Tpng requires -o");
        emit_png(graph, layout, dpi, out_path);
    } else {
        die("unsupported format: " + format);
    }
    return 0;
}
