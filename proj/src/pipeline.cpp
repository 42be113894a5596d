#include "mindkit/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "mindkit/errors.hpp"
#include "mindkit/manifest.hpp"
#include "mindkit/process.hpp"

namespace mindkit {

const char* kToolVersion = "0.1.0";

namespace {

constexpr std::uint64_t kTaskSalt = 0x7461736b73ULL;
constexpr std::uint64_t kLangSalt = 0x6c616e67ULL;
constexpr std::uint64_t kNoiseSalt = 0x6e6f697365ULL;
constexpr std::uint64_t kBackgroundSalt = 0x6261636bULL;

std::string zero_padded(char prefix, std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%08zu", prefix, index);
    return buf;
}

/// Exact language split: round(count * mix) EN instances, seeded placement.
std::vector<Language> stratified_languages(int count, double mix, std::uint64_t seed) {
    const int en_count =
        static_cast<int>(std::lround(std::clamp(mix, 0.0, 1.0) * count));
    std::vector<Language> langs(static_cast<std::size_t>(count), Language::cn);
    for (int i = 0; i < en_count; ++i) langs[static_cast<std::size_t>(i)] = Language::en;
    Rng rng(derive_seed(seed, kLangSalt));
    rng.shuffle(langs);
    return langs;
}

std::vector<Task> shuffled_task_labels(const MixtureConfig& mixture, std::uint64_t seed) {
    const std::array<Task, kTaskCount> all_tasks = {Task::full_parse, Task::part_parse,
                                                    Task::position_parse, Task::structured_vqa,
                                                    Task::position_vqa};
    std::vector<Task> labels;
    for (int t = 0; t < kTaskCount; ++t)
        for (int k = 0; k < mixture.counts[t]; ++k) labels.push_back(all_tasks[t]);
    Rng rng(derive_seed(seed, kTaskSalt));
    rng.shuffle(labels);
    return labels;
}

void attach_boxes(MindNode& root, const std::map<std::string, PixelBox>& boxes) {
    visit_with_path(root, [&](MindNode& node, const std::string& path) {
        auto it = boxes.find("n" + path);
        if (it == boxes.end())
            throw EngineFailure("geometry missing for node n" + path);
        node.box = it->second;
    });
}

} // namespace

void prepare_out_dir(const std::filesystem::path& out_dir, bool force) {
    if (std::filesystem::exists(out_dir)) {
        if (!std::filesystem::is_directory(out_dir))
            throw IoError(out_dir.string() + " exists and is not a directory");
        if (!force && !std::filesystem::is_empty(out_dir))
            throw IoError(out_dir.string() + " is not empty (use --force to overwrite)");
    }
    std::filesystem::create_directories(out_dir);
}

std::vector<Image> load_backgrounds(const std::filesystem::path& dir) {
    std::vector<Image> images;
    if (dir.empty()) return images;
    if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) images.push_back(load_png(file));
    return images;
}

std::vector<std::string> probe_engines(const std::vector<std::string>& engines,
                                       const std::string& graphviz_dir) {
    std::vector<std::string> missing;
    for (const auto& engine : engines) {
        const std::string exe =
            graphviz_dir.empty()
                ? engine
                : (std::filesystem::path(graphviz_dir) / engine).string();
        auto result = run_process({exe, "-V"}, 20.0);
        if (result.timed_out || result.exit_code == 127) missing.push_back(engine);
    }
    return missing;
}

namespace {

struct BuiltSample {
    MapRecord record;
    TaskInstance instance;
    std::vector<std::uint8_t> png;
};

BuiltSample build_sample(const GenParams& params, std::size_t index, Task task, Language language,
                         const TextCorpus& corpus_en, const TextCorpus& corpus_cn,
                         const std::vector<Image>& backgrounds) {
    const std::uint64_t sample_seed = derive_seed(params.seed, index + 1);
    Rng rng(sample_seed);

    const TextCorpus& corpus = language == Language::en ? corpus_en : corpus_cn;
    RenderOptions render_options;
    render_options.graphviz_dir = params.graphviz_dir;
    render_options.dpi = params.synth.dpi;
    render_options.timeout_sec = params.render_timeout_sec;

    // A draw that cannot host the task (e.g. a 1-node tree for part parsing)
    // resamples with a fresh derived seed.
    for (int attempt = 0;; ++attempt) {
        MindNode tree = sample_tree(params.synth, rng);
        tree = sample_texts(std::move(tree), corpus, rng);
        StyleSpec style = sample_style(params.synth, rng);
        const std::string dot = emit_dot(tree, style);

        RenderResult rendered = layout_and_render(dot, style.engine, render_options);

        CompositeConfig composite;
        composite.background_count_min = params.synth.background_count_min;
        composite.background_count_max = params.synth.background_count_max;
        Rng composite_rng(derive_seed(sample_seed, kBackgroundSalt));
        rendered = composite_background(std::move(rendered), backgrounds, composite_rng,
                                        composite);

        const double sigma =
            rng.real(params.synth.noise_sigma_min, params.synth.noise_sigma_max);
        add_gaussian_noise(rendered.image, sigma, derive_seed(sample_seed, kNoiseSalt));

        attach_boxes(tree, rendered.boxes);

        BuiltSample sample;
        sample.record.map.root = std::move(tree);
        sample.record.map.language = language;
        sample.record.map.source = MapSource::synthetic;
        sample.record.map.image_width = rendered.image.width;
        sample.record.map.image_height = rendered.image.height;
        sample.record.map.id = zero_padded('m', index);
        sample.record.engine = style.engine;
        sample.record.image_path = "images/" + sample.record.map.id + ".png";

        try {
            sample.instance = make_instance(sample.record.map, task, rng);
        } catch (const NoEligibleNode&) {
            if (attempt >= 15) throw;
            continue;
        }
        sample.instance.id = zero_padded('s', index);
        sample.instance.image_path = sample.record.image_path;
        sample.png = encode_png(rendered.image);
        return sample;
    }
}

nlohmann::ordered_json gen_config_snapshot(const GenParams& params) {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["command"] = "gen";
    j["seed"] = params.seed;
    j["count"] = params.count;
    j["mixture_weights"] = params.mixture_weights;
    nlohmann::ordered_json synth;
    synth["node_count_min"] = params.synth.node_count_min;
    synth["node_count_max"] = params.synth.node_count_max;
    synth["max_children"] = params.synth.max_children;
    synth["max_depth"] = params.synth.max_depth;
    synth["language_mix"] = params.synth.language_mix;
    synth["background_count_min"] = params.synth.background_count_min;
    synth["background_count_max"] = params.synth.background_count_max;
    synth["noise_sigma_min"] = params.synth.noise_sigma_min;
    synth["noise_sigma_max"] = params.synth.noise_sigma_max;
    synth["dpi"] = params.synth.dpi;
    synth["engines"] = params.synth.style_space.engines;
    j["synth"] = std::move(synth);
    j["corpus_en"] = params.corpus_en_path.string();
    j["corpus_cn"] = params.corpus_cn_path.string();
    j["backgrounds_dir"] = params.backgrounds_dir.string();
    j["graphviz_dir"] = params.graphviz_dir;
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
}

} // namespace

GenOutcome run_gen(const GenParams& params) {
    GenOutcome outcome;
    outcome.requested = params.count;

    prepare_out_dir(params.out_dir, params.force);
    std::filesystem::create_directories(params.out_dir / "images");

    const TextCorpus corpus_en = load_corpus(params.corpus_en_path, Language::en);
    const TextCorpus corpus_cn = load_corpus(params.corpus_cn_path, Language::cn);
    const std::vector<Image> backgrounds = load_backgrounds(params.backgrounds_dir);

    const MixtureConfig mixture =
        MixtureConfig::from_total(params.count, params.mixture_weights);
    const std::vector<Task> tasks = shuffled_task_labels(mixture, params.seed);
    const std::vector<Language> languages =
        stratified_languages(params.count, params.synth.language_mix, params.seed);

    const int n = params.count;
    std::vector<BuiltSample> samples(static_cast<std::size_t>(n));
    std::vector<std::string> errors(static_cast<std::size_t>(n));

    const int threads = params.workers > 0 ? params.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            samples[idx] = build_sample(params, idx, tasks[idx], languages[idx], corpus_en,
                                        corpus_cn, backgrounds);
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    }

    std::vector<TaskInstance> instances;
    std::vector<MapRecord> records;
    std::string log;
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (!errors[idx].empty()) {
            outcome.errors.push_back(zero_padded('s', idx) + ": " + errors[idx]);
            log += "ERROR " + zero_padded('s', idx) + " " + errors[idx] + "\n";
            continue;
        }
        BuiltSample& sample = samples[idx];
        write_text_file(params.out_dir / sample.record.image_path,
                        std::string(sample.png.begin(), sample.png.end()));
        instances.push_back(std::move(sample.instance));
        records.push_back(std::move(sample.record));
    }
    outcome.generated = static_cast<int>(instances.size());

    write_manifest(instances, params.out_dir / "manifest.jsonl");
    write_map_records(records, params.out_dir / "maps.jsonl");
    write_text_file(params.out_dir / "config.json", gen_config_snapshot(params).dump(2) + "\n");
    log += "generated " + std::to_string(outcome.generated) + "/" +
           std::to_string(outcome.requested) + " instances\n";
    write_text_file(params.out_dir / "gen.log", log);
    outcome.manifest_path = params.out_dir / "manifest.jsonl";
    return outcome;
}

IngestOutcome run_ingest(const IngestParams& params) {
    IngestOutcome outcome;
    prepare_out_dir(params.out_dir, params.force);

    IngestReport report = ingest_directory(params.input_dir, params.config);
    outcome.warnings = report.warnings;
    outcome.errors = report.errors;

    std::vector<TaskInstance> instances;
    std::vector<MapRecord> records;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        IngestEntry& entry = report.entries[i];
        MapRecord record;
        record.map = std::move(entry.map);
        record.image_path =
            std::filesystem::relative(entry.image_path, params.out_dir).generic_string();
        Rng rng(derive_seed(params.seed, i + 1));
        TaskInstance inst = gen_full_parse(record.map, rng);
        inst.id = zero_padded('c', i);
        inst.image_path = record.image_path;
        instances.push_back(std::move(inst));
        records.push_back(std::move(record));
    }
    outcome.pairs = static_cast<int>(instances.size());

    write_manifest(instances, params.out_dir / "manifest.jsonl");
    write_map_records(records, params.out_dir / "maps.jsonl");
    nlohmann::ordered_json snapshot;
    snapshot["tool_version"] = kToolVersion;
    snapshot["command"] = "ingest";
    snapshot["seed"] = params.seed;
    snapshot["input_dir"] = params.input_dir.string();
    snapshot["topic"] = params.config.topic_selector;
    snapshot["text"] = params.config.text_selector;
    snapshot["children"] = params.config.children_selector;
    snapshot["language"] = to_string(params.config.language);
    snapshot["strict"] = params.config.strict;
    write_text_file(params.out_dir / "config.json", snapshot.dump(2) + "\n");
    std::string log;
    for (const auto& w : outcome.warnings) log += "WARN " + w + "\n";
    for (const auto& e : outcome.errors) log += "ERROR " + e + "\n";
    log += "ingested " + std::to_string(outcome.pairs) + " pairs\n";
    write_text_file(params.out_dir / "ingest.log", log);
    outcome.manifest_path = params.out_dir / "manifest.jsonl";
    return outcome;
}

GenOutcome run_remix(const RemixParams& params) {
    GenOutcome outcome;
    prepare_out_dir(params.out_dir, params.force);

    std::vector<MapRecord> records = read_map_records(params.input_dir / "maps.jsonl");
    // image paths live relative to the source dataset; retarget them
    for (auto& record : records) {
        record.image_path = std::filesystem::relative(params.input_dir / record.image_path,
                                                      params.out_dir)
                                .generic_string();
    }
    std::vector<TaskInstance> instances = build_dataset(records, params.mixture, params.seed);
    outcome.requested = static_cast<int>(instances.size());
    outcome.generated = outcome.requested;

    write_manifest(instances, params.out_dir / "manifest.jsonl");
    nlohmann::ordered_json snapshot;
    snapshot["tool_version"] = kToolVersion;
    snapshot["command"] = "tasks";
    snapshot["seed"] = params.seed;
    snapshot["input_dir"] = params.input_dir.string();
    snapshot["counts"] = params.mixture.counts;
    snapshot["test_counts"] = params.mixture.test_counts;
    write_text_file(params.out_dir / "config.json", snapshot.dump(2) + "\n");
    outcome.manifest_path = params.out_dir / "manifest.jsonl";
    return outcome;
}

} // namespace mindkit
