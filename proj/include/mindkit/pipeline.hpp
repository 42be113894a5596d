#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mindkit/ingest.hpp"
#include "mindkit/render.hpp"
#include "mindkit/synth.hpp"
#include "mindkit/tasks.hpp"

namespace mindkit {

extern const char* kToolVersion;

struct GenParams {
    std::uint64_t seed = 0;
    int count = 100; // task instances; each synthesizes its own map
    SynthConfig synth;
    std::array<double, kTaskCount> mixture_weights = MixtureConfig::default_weights();
    std::filesystem::path out_dir;
    std::filesystem::path corpus_en_path;
    std::filesystem::path corpus_cn_path;
    std::filesystem::path backgrounds_dir; // empty: no compositing backgrounds
    std::string graphviz_dir;              // empty: engines resolved on PATH
    double render_timeout_sec = 60.0;      // wall-clock cap per engine invocation
    int workers = 0;                       // 0: library default
    bool force = false;
};

struct GenOutcome {
    int requested = 0;
    int generated = 0;
    std::vector<std::string> errors; // per-instance failures
    std::filesystem::path manifest_path;
};

/// synthgen -> render -> taskgen for `count` instances. Writes images/,
/// manifest.jsonl, maps.jsonl, config.json and gen.log under out_dir.
/// Instance i derives every random choice from (seed, i); output bytes are
/// independent of the worker count.
GenOutcome run_gen(const GenParams& params);

/// One engine invocation per engine name with -V to verify the binaries
/// exist before a batch starts. Returns the missing ones.
std::vector<std::string> probe_engines(const std::vector<std::string>& engines,
                                       const std::string& graphviz_dir);

struct IngestParams {
    std::filesystem::path input_dir;
    std::filesystem::path out_dir;
    IngestConfig config;
    std::uint64_t seed = 0;
    bool force = false;
};

struct IngestOutcome {
    int pairs = 0;
    std::vector<std::string> warnings;
    std::vector<std::string> errors;
    std::filesystem::path manifest_path;
};

/// HTML/PNG pairs -> canonical maps + full-parse instances.
IngestOutcome run_ingest(const IngestParams& params);

struct RemixParams {
    std::filesystem::path input_dir; // an existing dataset (maps.jsonl + images)
    std::filesystem::path out_dir;
    MixtureConfig mixture;
    std::uint64_t seed = 0;
    bool force = false;
};

/// Re-mixes stored maps into a fresh task manifest without re-rendering.
GenOutcome run_remix(const RemixParams& params);

/// Creates out_dir; an existing non-empty directory requires force.
void prepare_out_dir(const std::filesystem::path& out_dir, bool force);

/// Loads every PNG in the directory, sorted by filename.
std::vector<Image> load_backgrounds(const std::filesystem::path& dir);

} // namespace mindkit
