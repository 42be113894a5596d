#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "mindkit/errors.hpp"
#include "mindkit/eval.hpp"
#include "mindkit/manifest.hpp"
#include "mindkit/pipeline.hpp"
#include "mindkit/stats.hpp"

// Exit codes: 0 success, 1 partial or failed, 2 usage, 3 environment
// (layout engines unavailable).

namespace {

using namespace mindkit;

#ifndef MINDKIT_DATA_DIR
#define MINDKIT_DATA_DIR "data"
#endif

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("MINDKIT_DATA")) return env;
    return MINDKIT_DATA_DIR;
}

std::string env_graphviz_dir() {
    if (const char* env = std::getenv("MINDKIT_GRAPHVIZ_BIN")) return env;
    return "";
}

/// Config-file values for keys whose flag was not given on the command line.
nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw SchemaError("config file must hold a JSON object: " + path);
    return j;
}

template <class T>
void take(const nlohmann::json& config, const char* key, T& target, const CLI::App& app,
          const std::string& flag) {
    if (!config.contains(key)) return;
    if (app.count(flag) > 0) return; // flag wins
    target = config.at(key).get<T>();
}

int cmd_gen(CLI::App& app, const std::string& config_path, GenParams& params,
            std::string& engines_csv) {
    if (!config_path.empty()) {
        auto config = load_config_file(config_path);
        take(config, "seed", params.seed, app, "--seed");
        take(config, "count", params.count, app, "--count");
        take(config, "workers", params.workers, app, "--workers");
        take(config, "graphviz_bin", params.graphviz_dir, app, "--graphviz-bin");
        take(config, "render_timeout", params.render_timeout_sec, app, "--render-timeout");
        take(config, "dpi", params.synth.dpi, app, "--dpi");
        take(config, "language_mix", params.synth.language_mix, app, "--language-mix");
        take(config, "node_count_min", params.synth.node_count_min, app, "--node-min");
        take(config, "node_count_max", params.synth.node_count_max, app, "--node-max");
        take(config, "max_children", params.synth.max_children, app, "--max-children");
        take(config, "max_depth", params.synth.max_depth, app, "--max-depth");
        take(config, "background_count_min", params.synth.background_count_min, app, "--bg-min");
        take(config, "background_count_max", params.synth.background_count_max, app, "--bg-max");
        take(config, "noise_sigma_min", params.synth.noise_sigma_min, app, "--noise-min");
        take(config, "noise_sigma_max", params.synth.noise_sigma_max, app, "--noise-max");
        take(config, "engines", engines_csv, app, "--engines");
        if (config.contains("mixture_weights") && app.count("--mix") == 0) {
            auto w = config.at("mixture_weights").get<std::vector<double>>();
            if (w.size() != kTaskCount) throw SchemaError("mixture_weights needs 5 entries");
            std::copy(w.begin(), w.end(), params.mixture_weights.begin());
        }
    }
    if (params.graphviz_dir.empty()) params.graphviz_dir = env_graphviz_dir();
    if (!engines_csv.empty()) {
        std::vector<std::string> engines;
        std::stringstream ss(engines_csv);
        std::string engine;
        while (std::getline(ss, engine, ',')) {
            if (!engine.empty()) engines.push_back(engine);
        }
        if (engines.empty()) throw SchemaError("--engines lists no engine");
        params.synth.style_space.engines = engines;
    }

    auto missing = probe_engines(params.synth.style_space.engines, params.graphviz_dir);
    if (!missing.empty()) {
        std::cerr << "error: layout engines not available:";
        for (const auto& engine : missing) std::cerr << " " << engine;
        std::cerr << "\n       install Graphviz or point --graphviz-bin / MINDKIT_GRAPHVIZ_BIN "
                     "at a directory with the engine binaries\n";
        return 3;
    }

    GenOutcome outcome = run_gen(params);
    std::cout << "generated " << outcome.generated << "/" << outcome.requested
              << " instances -> " << outcome.manifest_path.string() << "\n";
    for (const auto& e : outcome.errors) std::cerr << "error: " << e << "\n";
    if (!outcome.errors.empty()) return 1;
    return 0;
}

int cmd_ingest(IngestParams& params, const std::string& profile) {
    std::filesystem::path profile_path = profile;
    if (!std::filesystem::exists(profile_path))
        profile_path = data_dir() / "ingest_profiles" / (profile + ".json");
    IngestConfig file_config = load_ingest_profile(profile_path);
    file_config.language = params.config.language;
    file_config.strict = params.config.strict;
    params.config = file_config;

    IngestOutcome outcome = run_ingest(params);
    std::cout << "ingested " << outcome.pairs << " pairs -> "
              << outcome.manifest_path.string() << "\n";
    for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& e : outcome.errors) std::cerr << "error: " << e << "\n";
    if (outcome.pairs == 0) return 1;
    return outcome.errors.empty() ? 0 : 1;
}

int cmd_tasks(RemixParams& params, int total, const std::vector<int>& counts,
              const std::vector<int>& test_counts) {
    if (total > 0) {
        params.mixture = MixtureConfig::from_total(total, MixtureConfig::default_weights());
    }
    if (!counts.empty()) {
        if (counts.size() != kTaskCount) throw SchemaError("--counts needs 5 values");
        std::copy(counts.begin(), counts.end(), params.mixture.counts.begin());
    }
    if (!test_counts.empty()) {
        if (test_counts.size() != kTaskCount) throw SchemaError("--test-counts needs 5 values");
        std::copy(test_counts.begin(), test_counts.end(), params.mixture.test_counts.begin());
    }
    GenOutcome outcome = run_remix(params);
    std::cout << "built " << outcome.generated << " instances -> "
              << outcome.manifest_path.string() << "\n";
    return 0;
}

int cmd_eval(const std::string& manifest_path, const std::string& predictions_path,
             const std::string& out_dir, bool force) {
    auto manifest = read_manifest(manifest_path);
    auto predictions = read_predictions(predictions_path);
    EvalReport report = evaluate_run(manifest, predictions);

    prepare_out_dir(out_dir, force);
    {
        std::ofstream out(std::filesystem::path(out_dir) / "report.json", std::ios::binary);
        out << report_to_json(report).dump(2) << "\n";
        if (!out) throw IoError("cannot write report.json");
    }
    const std::string table = report_to_table(report);
    {
        std::ofstream out(std::filesystem::path(out_dir) / "report.txt", std::ios::binary);
        out << table;
        if (!out) throw IoError("cannot write report.txt");
    }
    std::cout << table;
    return 0;
}

int cmd_stats(const std::string& in_dir, const std::string& manifest_override,
              const std::string& out_dir) {
    std::filesystem::path manifest_path =
        manifest_override.empty() ? std::filesystem::path(in_dir) / "manifest.jsonl"
                                  : std::filesystem::path(manifest_override);
    auto manifest = read_manifest(manifest_path);
    DatasetStats stats = compute_stats(manifest, manifest_path.parent_path());
    export_stats(stats, out_dir);
    std::cout << "stats for " << stats.total.samples << " instances -> " << out_dir
              << "/stats.{json,csv}\n";
    for (const auto& e : stats.errors) std::cerr << "error: " << e << "\n";
    return stats.errors.empty() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mind-map dataset synthesis, ingestion and evaluation toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "synthesize maps, render them and emit task instances");
    GenParams gen_params;
    gen_params.corpus_en_path = data_dir() / "corpus_en.txt";
    gen_params.corpus_cn_path = data_dir() / "corpus_cn.txt";
    gen_params.backgrounds_dir = data_dir() / "backgrounds";
    std::string gen_config, engines_csv;
    std::vector<double> mix_weights;
    gen->add_option("--config", gen_config, "JSON config file (flags override it)");
    gen->add_option("--count", gen_params.count, "number of task instances");
    gen->add_option("--seed", gen_params.seed, "master seed");
    gen->add_option("--out", gen_params.out_dir, "output directory")->required();
    gen->add_option("--workers", gen_params.workers, "parallel render workers (0: all cores)");
    gen->add_option("--graphviz-bin", gen_params.graphviz_dir,
                    "directory holding the layout engine binaries");
    gen->add_option("--render-timeout", gen_params.render_timeout_sec,
                    "wall-clock seconds allowed per engine invocation");
    gen->add_option("--engines", engines_csv, "comma-separated engine subset");
    gen->add_option("--dpi", gen_params.synth.dpi, "render resolution");
    gen->add_option("--language-mix", gen_params.synth.language_mix, "fraction of EN maps");
    gen->add_option("--node-min", gen_params.synth.node_count_min, "minimum node count");
    gen->add_option("--node-max", gen_params.synth.node_count_max, "maximum node count");
    gen->add_option("--max-children", gen_params.synth.max_children, "children cap per node");
    gen->add_option("--max-depth", gen_params.synth.max_depth, "depth cap (root = 1)");
    gen->add_option("--bg-min", gen_params.synth.background_count_min, "min background images");
    gen->add_option("--bg-max", gen_params.synth.background_count_max, "max background images");
    gen->add_option("--noise-min", gen_params.synth.noise_sigma_min, "min gaussian sigma");
    gen->add_option("--noise-max", gen_params.synth.noise_sigma_max, "max gaussian sigma");
    gen->add_option("--corpus-en", gen_params.corpus_en_path, "EN corpus file");
    gen->add_option("--corpus-cn", gen_params.corpus_cn_path, "CN corpus file");
    gen->add_option("--backgrounds", gen_params.backgrounds_dir, "background PNG directory");
    gen->add_option("--mix", mix_weights, "five mixture weights")->expected(5);
    gen->add_flag("--force", gen_params.force, "write into a non-empty directory");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse HTML/PNG export pairs into the schema");
    IngestParams ingest_params;
    std::string profile = "xmind_html";
    std::string ingest_language = "en";
    ingest->add_option("--in", ingest_params.input_dir, "directory of paired files")->required();
    ingest->add_option("--out", ingest_params.out_dir, "output directory")->required();
    ingest->add_option("--profile", profile, "selector profile name or path");
    ingest->add_option("--language", ingest_language, "en or cn");
    ingest->add_option("--seed", ingest_params.seed, "seed for prompt templates");
    ingest->add_flag("--strict", ingest_params.config.strict,
                     "fail files whose topics lack a text element");
    ingest->add_flag("--force", ingest_params.force, "write into a non-empty directory");

    // tasks
    auto* tasks = app.add_subcommand("tasks", "re-mix stored maps into a new task manifest");
    RemixParams remix_params;
    int remix_total = 0;
    std::vector<int> remix_counts, remix_test_counts;
    tasks->add_option("--in", remix_params.input_dir, "existing dataset directory")->required();
    tasks->add_option("--out", remix_params.out_dir, "output directory")->required();
    tasks->add_option("--seed", remix_params.seed, "seed");
    tasks->add_option("--count", remix_total, "total instances, split by the default mixture");
    tasks->add_option("--counts", remix_counts, "five per-task train counts")->expected(5);
    tasks->add_option("--test-counts", remix_test_counts, "five per-task test counts")
        ->expected(5);
    tasks->add_flag("--force", remix_params.force, "write into a non-empty directory");

    // eval
    auto* eval = app.add_subcommand("eval", "score a predictions file against a manifest");
    std::string eval_manifest, eval_predictions, eval_out;
    bool eval_force = false;
    eval->add_option("--manifest", eval_manifest, "manifest.jsonl")->required();
    eval->add_option("--predictions", eval_predictions, "JSONL of {id, output}")->required();
    eval->add_option("--out", eval_out, "report directory")->required();
    eval->add_flag("--force", eval_force, "write into a non-empty directory");

    // stats
    auto* stats = app.add_subcommand("stats", "dataset statistics (resolution, tokens, shape)");
    std::string stats_in, stats_manifest, stats_out;
    stats->add_option("--in", stats_in, "dataset directory");
    stats->add_option("--manifest", stats_manifest, "explicit manifest path");
    stats->add_option("--out", stats_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) {
            if (!mix_weights.empty())
                std::copy(mix_weights.begin(), mix_weights.end(),
                          gen_params.mixture_weights.begin());
            return cmd_gen(*gen, gen_config, gen_params, engines_csv);
        }
        if (ingest->parsed()) {
            ingest_params.config.language = language_from_string(ingest_language);
            return cmd_ingest(ingest_params, profile);
        }
        if (tasks->parsed()) return cmd_tasks(remix_params, remix_total, remix_counts,
                                              remix_test_counts);
        if (eval->parsed()) return cmd_eval(eval_manifest, eval_predictions, eval_out, eval_force);
        if (stats->parsed()) return cmd_stats(stats_in, stats_manifest, stats_out);
    } catch (const EngineFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
