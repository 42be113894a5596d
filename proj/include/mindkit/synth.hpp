#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mindkit/rng.hpp"
#include "mindkit/tree.hpp"

namespace mindkit {

extern const std::vector<std::string> kLayoutEngines; // dot neato twopi circo fdp sfdp

/// Candidate values the style sampler draws from. Every entry must be legal
/// DOT attribute syntax.
struct StyleSpace {
    std::vector<std::string> engines = kLayoutEngines;
    std::vector<std::string> node_shapes;
    std::vector<std::string> node_styles;
    std::vector<std::string> fill_colors;
    std::vector<std::string> font_names;
    std::vector<std::string> edge_styles;
    std::vector<std::string> edge_colors;
    std::vector<std::string> arrowheads;
    std::vector<std::string> rankdirs;
    std::vector<std::string> bg_colors;
    std::pair<int, int> font_size_range{10, 20};
    std::pair<double, double> nodesep_range{0.2, 0.8};
    std::pair<double, double> ranksep_range{0.3, 1.2};

    static StyleSpace defaults();
};

struct StyleSpec {
    std::string engine;
    std::string node_shape, node_style, fill_color, font_name;
    std::string edge_style, edge_color, arrowhead;
    std::string rankdir, bg_color;
    int font_size = 12;
    double nodesep = 0.4, ranksep = 0.6;
};

bool operator==(const StyleSpec& a, const StyleSpec& b);

struct SynthConfig {
    std::uint64_t seed = 0;
    int node_count_min = 5;
    int node_count_max = 27;
    int max_children = 6;
    int max_depth = 5;
    double language_mix = 0.5; // fraction EN
    StyleSpace style_space = StyleSpace::defaults();
    int background_count_min = 0;
    int background_count_max = 3;
    double noise_sigma_min = 0.0;
    double noise_sigma_max = 12.0;
    int dpi = 96;
};

struct TextCorpus {
    Language language = Language::en;
    std::vector<std::string> entries;
};

/// One entry per line, UTF-8; blank lines skipped. Throws IoError.
TextCorpus load_corpus(const std::filesystem::path& path, Language lang);

/// Largest node count reachable under (max_depth, max_children), saturating.
std::uint64_t max_tree_capacity(int max_depth, int max_children);

/// Uniform random attachment under the depth and child-count caps; the result
/// has exactly N ~ Uniform[node_count_min, node_count_max] nodes. Throws
/// InfeasibleConfig when the range exceeds capacity.
MindNode sample_tree(const SynthConfig& config, Rng& rng);

/// Assigns every node 1-3 corpus entries, concatenated; texts within the map
/// are pairwise distinct. Throws CorpusTooSmall when entries < node count.
MindNode sample_texts(MindNode tree, const TextCorpus& corpus, Rng& rng);

StyleSpec sample_style(const SynthConfig& config, Rng& rng);

/// One DOT node per MindNode with id equal to its hierarchical path prefixed
/// "n" ("n1", "n1_2_1", ...) so geometry can be mapped back, one edge per
/// parent-child pair.
std::string emit_dot(const MindNode& tree, const StyleSpec& style);

std::string escape_dot_label(std::string_view text);

} // namespace mindkit
