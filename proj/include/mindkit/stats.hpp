#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mindkit/tasks.hpp"

namespace mindkit {

constexpr int kResolutionBucketPx = 1000;
constexpr int kTokenLengthBucket = 100;

struct SourceStats {
    int samples = 0;
    double mean_nodes = 0, mean_depth = 0;
    int nodes_p50 = 0, nodes_p90 = 0, nodes_max = 0;
    int depth_p50 = 0, depth_p90 = 0, depth_max = 0;
    double mean_answer_tokens = 0;
    std::map<int, int> resolution_hist;   // bucket floor(px/1000)*1000 -> count
    std::map<int, int> token_length_hist; // bucket floor(tokens/100)*100 -> count
    std::map<std::string, int> language_counts;
    std::map<std::string, int> task_counts;
};

struct DatasetStats {
    std::map<std::string, SourceStats> by_source; // "synthetic", "ingested"
    SourceStats total;
    std::vector<std::string> errors; // per-entry IO failures, non-fatal
};

/// Pure fold over the manifest; image dimensions come from PNG headers
/// resolved relative to `image_root` (no raster decode).
DatasetStats compute_stats(const std::vector<TaskInstance>& manifest,
                           const std::filesystem::path& image_root);

nlohmann::ordered_json stats_to_json(const DatasetStats& stats);
std::string stats_to_csv(const DatasetStats& stats);

/// Writes stats.json and stats.csv into the directory.
void export_stats(const DatasetStats& stats, const std::filesystem::path& out_dir);

} // namespace mindkit
