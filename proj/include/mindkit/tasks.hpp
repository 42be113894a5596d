#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mindkit/rng.hpp"
#include "mindkit/tree.hpp"

namespace mindkit {

enum class Task { full_parse, part_parse, position_parse, structured_vqa, position_vqa };

constexpr int kTaskCount = 5;
constexpr int kChallengingNodeCount = 60; // boundary of the simple/challenging split

std::string task_name(Task task);
Task task_from_name(std::string_view name);

inline bool is_challenging(int node_count) { return node_count >= kChallengingNodeCount; }
inline std::string complexity_tag(int node_count) {
    return is_challenging(node_count) ? "challenging" : "simple";
}

std::string bbox_literal(const NormBox& box);
std::optional<NormBox> parse_bbox_literal(std::string_view text);
/// First bbox literal found anywhere in the text.
std::optional<NormBox> find_bbox_literal(std::string_view text);

struct TaskInstance {
    std::string id;
    Task task = Task::full_parse;
    std::string image_path; // relative to the manifest's directory
    std::string prompt;
    std::string answer;
    // meta
    Language language = Language::en;
    int node_count = 0;
    int depth = 0;
    MapSource source = MapSource::synthetic;
    std::string question_family;
    std::string template_id;
    std::string split = "train";
    std::optional<PixelBox> query_box_px; // recognition questions: the pixel-space query
};

/// Per-task instance counts, ordered full, part, position-parse,
/// structured-vqa, position-vqa.
struct MixtureConfig {
    std::array<int, kTaskCount> counts{};
    std::array<int, kTaskCount> test_counts{};

    static const std::array<double, kTaskCount>& default_weights(); // .50 .10 .10 .15 .15
    /// Largest-remainder allocation of `total` instances over `weights`.
    static MixtureConfig from_total(int total, const std::array<double, kTaskCount>& weights);
};

TaskInstance gen_full_parse(const MindMap& map, Rng& rng);
/// Throws NoEligibleNode on single-node maps or maps without a unique-text
/// non-root node.
TaskInstance gen_part_parse(const MindMap& map, Rng& rng);
/// Throws MissingGeometry when the map carries no boxes.
TaskInstance gen_position_parse(const MindMap& map, Rng& rng);
TaskInstance gen_structured_vqa(const MindMap& map, Rng& rng);
TaskInstance gen_position_vqa(const MindMap& map, Rng& rng);

TaskInstance make_instance(const MindMap& map, Task task, Rng& rng);

struct MapRecord {
    MindMap map;
    std::string image_path;
    std::string engine; // layout engine used, empty for ingested maps
};

/// Assembles instances over existing maps per the mixture; instance i draws
/// its own rng from (seed, i) so results are independent of scheduling.
/// Throws InsufficientMaps when a requested task has no eligible map.
std::vector<TaskInstance> build_dataset(const std::vector<MapRecord>& maps,
                                        const MixtureConfig& mixture, std::uint64_t seed);

/// Template inventory version stamped into template ids.
extern const char* kTemplateVersion;

} // namespace mindkit
