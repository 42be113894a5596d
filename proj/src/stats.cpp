#include "mindkit/stats.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mindkit/errors.hpp"
#include "mindkit/image.hpp"
#include "mindkit/tokens.hpp"

namespace mindkit {

namespace {

struct Measurement {
    int nodes = 0, depth = 0, tokens = 0, longest_side = 0;
    std::string source, language, task;
    bool ok = true;
    std::string error;
};

int percentile(std::vector<int>& values, double p) {
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(p * (values.size() - 1) + 0.5);
    return values[std::min(idx, values.size() - 1)];
}

void accumulate(SourceStats& s, const Measurement& m, std::vector<int>& nodes,
                std::vector<int>& depths) {
    ++s.samples;
    nodes.push_back(m.nodes);
    depths.push_back(m.depth);
    s.mean_nodes += m.nodes;
    s.mean_depth += m.depth;
    s.mean_answer_tokens += m.tokens;
    if (m.longest_side > 0)
        ++s.resolution_hist[m.longest_side / kResolutionBucketPx * kResolutionBucketPx];
    ++s.token_length_hist[m.tokens / kTokenLengthBucket * kTokenLengthBucket];
    ++s.language_counts[m.language];
    ++s.task_counts[m.task];
}

void finalize(SourceStats& s, std::vector<int>& nodes, std::vector<int>& depths) {
    if (s.samples == 0) return;
    s.mean_nodes /= s.samples;
    s.mean_depth /= s.samples;
    s.mean_answer_tokens /= s.samples;
    s.nodes_p50 = percentile(nodes, 0.5);
    s.nodes_p90 = percentile(nodes, 0.9);
    s.nodes_max = nodes.empty() ? 0 : *std::max_element(nodes.begin(), nodes.end());
    s.depth_p50 = percentile(depths, 0.5);
    s.depth_p90 = percentile(depths, 0.9);
    s.depth_max = depths.empty() ? 0 : *std::max_element(depths.begin(), depths.end());
}

} // namespace

DatasetStats compute_stats(const std::vector<TaskInstance>& manifest,
                           const std::filesystem::path& image_root) {
    std::vector<Measurement> measurements(manifest.size());

#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        const TaskInstance& inst = manifest[i];
        Measurement m;
        m.nodes = inst.node_count;
        m.depth = inst.depth;
        m.tokens = count_tokens(inst.answer, inst.language);
        m.source = to_string(inst.source);
        m.language = to_string(inst.language);
        m.task = task_name(inst.task);
        if (!inst.image_path.empty()) {
            try {
                auto [w, h] = read_png_dimensions(image_root / inst.image_path);
                m.longest_side = std::max(w, h);
            } catch (const IoError& e) {
                m.ok = false;
                m.error = inst.id + ": " + e.what();
            }
        }
        measurements[i] = std::move(m);
    }

    DatasetStats stats;
    std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> samples_by_source;
    std::pair<std::vector<int>, std::vector<int>> samples_total;
    for (const auto& m : measurements) {
        if (!m.ok) stats.errors.push_back(m.error);
        auto& per_source = samples_by_source[m.source];
        accumulate(stats.by_source[m.source], m, per_source.first, per_source.second);
        accumulate(stats.total, m, samples_total.first, samples_total.second);
    }
    for (auto& [source, s] : stats.by_source) {
        auto& lists = samples_by_source[source];
        finalize(s, lists.first, lists.second);
    }
    finalize(stats.total, samples_total.first, samples_total.second);
    return stats;
}

namespace {

nlohmann::ordered_json source_stats_to_json(const SourceStats& s) {
    nlohmann::ordered_json j;
    j["samples"] = s.samples;
    j["mean_nodes"] = s.mean_nodes;
    j["mean_depth"] = s.mean_depth;
    j["nodes_p50"] = s.nodes_p50;
    j["nodes_p90"] = s.nodes_p90;
    j["nodes_max"] = s.nodes_max;
    j["depth_p50"] = s.depth_p50;
    j["depth_p90"] = s.depth_p90;
    j["depth_max"] = s.depth_max;
    j["mean_answer_tokens"] = s.mean_answer_tokens;
    auto hist = [](const std::map<int, int>& h) {
        nlohmann::ordered_json out = nlohmann::ordered_json::object();
        for (const auto& [bucket, count] : h) out[std::to_string(bucket)] = count;
        return out;
    };
    j["resolution_hist"] = hist(s.resolution_hist);
    j["token_length_hist"] = hist(s.token_length_hist);
    nlohmann::ordered_json langs = nlohmann::ordered_json::object();
    for (const auto& [lang, count] : s.language_counts) langs[lang] = count;
    j["language_counts"] = std::move(langs);
    nlohmann::ordered_json tasks = nlohmann::ordered_json::object();
    for (const auto& [task, count] : s.task_counts) tasks[task] = count;
    j["task_counts"] = std::move(tasks);
    return j;
}

} // namespace

nlohmann::ordered_json stats_to_json(const DatasetStats& stats) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json sources = nlohmann::ordered_json::object();
    for (const auto& [source, s] : stats.by_source) sources[source] = source_stats_to_json(s);
    j["by_source"] = std::move(sources);
    j["total"] = source_stats_to_json(stats.total);
    j["errors"] = stats.errors;
    return j;
}

std::string stats_to_csv(const DatasetStats& stats) {
    std::ostringstream out;
    out << "source,samples,mean_nodes,mean_depth,nodes_p50,nodes_p90,nodes_max,"
           "depth_p50,depth_p90,depth_max,mean_answer_tokens\n";
    char line[256];
    auto row = [&](const std::string& name, const SourceStats& s) {
        std::snprintf(line, sizeof line, "%s,%d,%.4f,%.4f,%d,%d,%d,%d,%d,%d,%.4f\n", name.c_str(),
                      s.samples, s.mean_nodes, s.mean_depth, s.nodes_p50, s.nodes_p90, s.nodes_max,
                      s.depth_p50, s.depth_p90, s.depth_max, s.mean_answer_tokens);
        out << line;
    };
    for (const auto& [source, s] : stats.by_source) row(source, s);
    if (!stats.by_source.empty()) row("total", stats.total);

    out << "\nhistogram,source,bucket,count\n";
    for (const auto& [source, s] : stats.by_source) {
        for (const auto& [bucket, count] : s.resolution_hist)
            out << "resolution," << source << "," << bucket << "," << count << "\n";
        for (const auto& [bucket, count] : s.token_length_hist)
            out << "token_length," << source << "," << bucket << "," << count << "\n";
    }
    return out.str();
}

void export_stats(const DatasetStats& stats, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream json_out(out_dir / "stats.json", std::ios::binary);
        if (!json_out) throw IoError("cannot write stats.json");
        json_out << stats_to_json(stats).dump(2) << "\n";
    }
    {
        std::ofstream csv_out(out_dir / "stats.csv", std::ios::binary);
        if (!csv_out) throw IoError("cannot write stats.csv");
        csv_out << stats_to_csv(stats);
    }
}

} // namespace mindkit
