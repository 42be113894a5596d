#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mindkit {

enum class Language { en, cn };
enum class MapSource { synthetic, ingested };

std::string to_string(Language lang);
std::string to_string(MapSource src);
Language language_from_string(std::string_view s);
MapSource source_from_string(std::string_view s);

/// Axis-aligned box in pixel coordinates, image origin top-left.
struct PixelBox {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    bool contains(const PixelBox& other) const {
        return other.x1 >= x1 && other.y1 >= y1 && other.x2 <= x2 && other.y2 <= y2;
    }
};

bool operator==(const PixelBox& a, const PixelBox& b);

/// Box with integer coordinates normalized to [0, 999] per image dimension.
struct NormBox {
    int x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    bool contains(const NormBox& other) const {
        return other.x1 >= x1 && other.y1 >= y1 && other.x2 <= x2 && other.y2 <= y2;
    }
};

bool operator==(const NormBox& a, const NormBox& b);

/// One topic of a mind map: a label plus an ordered list of subtopics.
/// The box is present only for rendered synthetic maps.
struct MindNode {
    std::string text;
    std::vector<MindNode> children;
    std::optional<PixelBox> box;
};

/// Structural identity: text and children, recursively. Geometry is excluded
/// on purpose; serialization formats carry structure only.
bool operator==(const MindNode& a, const MindNode& b);

struct MindMap {
    MindNode root;
    Language language = Language::en;
    int image_width = 0;
    int image_height = 0;
    MapSource source = MapSource::synthetic;
    std::string id;
};

int tree_size(const MindNode& tree);

/// Number of nodes on the longest root-to-leaf path; a single node has depth 1.
int tree_depth(const MindNode& tree);

struct SubtreeMatch {
    const MindNode* node = nullptr;
    bool ambiguous = false; // more than one node carries the theme text
};

/// First preorder node whose text equals `theme` exactly. Throws NotFound.
SubtreeMatch find_subtree(const MindNode& root, std::string_view theme);

/// Preorder walk carrying the hierarchical path of each node
/// (root = "1", its k-th child = parent path + "_" + k, 1-based).
void visit_with_path(const MindNode& root,
                     const std::function<void(const MindNode&, const std::string&)>& fn);
void visit_with_path(MindNode& root,
                     const std::function<void(MindNode&, const std::string&)>& fn);

/// True when every node in the tree carries a box.
bool has_full_geometry(const MindNode& root);

} // namespace mindkit
