#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mindkit/tasks.hpp"
#include "mindkit/tree.hpp"

namespace mindkit {

/// Ordered tree edit distance via the Zhang-Shasha keyroot dynamic program.
/// Unit insert/delete cost; rename costs 0 when the labels match, 1 otherwise.
int zss_ted(const MindNode& a, const MindNode& b);

/// max(1 - TED/|gold|, 0). A null prediction (unparseable output) scores 0.
double nted_accuracy(const MindNode* pred, const MindNode& gold);

struct Prf {
    double precision = 0, recall = 0, f1 = 0;
};

/// Field-level scores over the flattened (ancestor-path, text) multisets.
Prf field_f1(const MindNode& pred, const MindNode& gold);

struct RepairResult {
    std::optional<MindNode> tree;
    bool parse_ok = false; // strict parse succeeded, no repair was needed
};

/// Best-effort recovery of a tree from raw model output: strict parse first;
/// otherwise strip junk before the first <s_n1> and after the last closing
/// tag, drop a trailing half-written tag, and re-parse leniently with
/// auto-close at end-of-string.
RepairResult repair_and_parse(std::string_view output);

/// Bag-of-tokens F1. EN: lowercased whitespace-split words, punctuation
/// stripped; CN: individual code points. Bbox literals contribute their four
/// integers as tokens in both languages.
Prf vqa_f1_scores(std::string_view pred, std::string_view gold, Language lang);
double vqa_f1(std::string_view pred, std::string_view gold, Language lang);

struct PredictionRecord {
    std::string id;
    std::string output;
};

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);

struct SampleScore {
    std::string id;
    Task task = Task::full_parse;
    Language language = Language::en;
    MapSource source = MapSource::synthetic;
    bool challenging = false;
    bool missing = false;  // no prediction supplied; scored 0
    bool parse_ok = false; // parse tasks: strict parse succeeded
    int gold_tree_size = 0;
    std::optional<int> ted;      // parse tasks with a recoverable tree
    std::optional<double> nted;
    double accuracy = 0; // parse tasks only; VQA rows keep 0 and are excluded from means
    double precision = 0, recall = 0, f1 = 0;
    std::optional<double> aux_iou; // grounding questions only; not a paper metric
};

struct Aggregate {
    int n = 0;       // samples in the bucket
    int n_parse = 0; // samples carrying accuracy
    int n_missing = 0;
    double accuracy = 0; // mean over parse samples
    double precision = 0, recall = 0, f1 = 0; // mean over all samples
};

struct EvalReport {
    std::vector<SampleScore> samples; // manifest order
    Aggregate overall;
    std::vector<std::pair<std::string, Aggregate>> by_task, by_source, by_language,
        by_complexity;
};

/// Scores every manifest instance; predictions may arrive in any order.
/// Missing predictions score 0 and are flagged; unknown ids throw UnknownId;
/// duplicate ids throw SchemaError. Output is independent of worker count.
EvalReport evaluate_run(const std::vector<TaskInstance>& manifest,
                        const std::vector<PredictionRecord>& predictions);
/// Reference implementation without the parallel scoring loop.
EvalReport evaluate_run_serial(const std::vector<TaskInstance>& manifest,
                               const std::vector<PredictionRecord>& predictions);

nlohmann::ordered_json report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);

} // namespace mindkit
