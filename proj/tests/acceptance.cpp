// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Each criterion states its own tolerance; runtime caps are
// enforced where specified.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mindkit/errors.hpp"
#include "mindkit/eval.hpp"
#include "mindkit/json_codec.hpp"
#include "mindkit/manifest.hpp"
#include "mindkit/pipeline.hpp"
#include "mindkit/render.hpp"
#include "mindkit/stats.hpp"
#include "mindkit/synth.hpp"
#include "mindkit/tokens.hpp"
#include "support.hpp"

using namespace mindkit;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure(what);
}

void require_near(double actual, double expected, double tol, const std::string& what) {
    if (!(std::abs(actual - expected) <= tol))
        throw CheckFailure(what + ": got " + std::to_string(actual) + ", want " +
                           std::to_string(expected) + " +- " + std::to_string(tol));
}

std::string cli_path() { return MINDKIT_CLI_PATH; }

/// Real engines when all six are on PATH, the bundled mock otherwise.
std::string engine_dir() {
    static const std::string dir = [] {
        return probe_engines(kLayoutEngines, "").empty() ? std::string()
                                                         : std::string(MINDKIT_MOCKGV_DIR);
    }();
    return dir;
}

std::string engine_note() {
    return engine_dir().empty() ? "system graphviz" : "bundled mock engines";
}

int run_cli(const std::string& args, const std::filesystem::path& log) {
    const std::string cmd = cli_path() + " " + args + " > " + log.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

MindNode leaf(std::string text) {
    MindNode n;
    n.text = std::move(text);
    return n;
}

MindNode node(std::string text, std::vector<MindNode> children) {
    MindNode n;
    n.text = std::move(text);
    n.children = std::move(children);
    return n;
}

TextCorpus make_corpus(Language lang, int n) {
    TextCorpus corpus;
    corpus.language = lang;
    for (int i = 0; i < n; ++i)
        corpus.entries.push_back(lang == Language::cn ? "主题" + std::to_string(i)
                                                      : "topic" + std::to_string(i));
    return corpus;
}

/// The unique node quoted in a prompt with '...' or CJK quotes.
const MindNode* quoted_node(const MindMap& map, const std::string& prompt) {
    const MindNode* found = nullptr;
    bool duplicate = false;
    visit_with_path(map.root, [&](const MindNode& n, const std::string&) {
        if (prompt.find("'" + n.text + "'") != std::string::npos ||
            prompt.find("“" + n.text + "”") != std::string::npos) {
            if (found) duplicate = true;
            found = &n;
        }
    });
    require(found != nullptr && !duplicate, "prompt does not name a unique node: " + prompt);
    return found;
}

PixelBox subtree_union(const MindNode& n) {
    PixelBox box = *n.box;
    for (const auto& c : n.children) {
        PixelBox cb = subtree_union(c);
        box.x1 = std::min(box.x1, cb.x1);
        box.y1 = std::min(box.y1, cb.y1);
        box.x2 = std::max(box.x2, cb.x2);
        box.y2 = std::max(box.y2, cb.y2);
    }
    return box;
}

// --------------------------------------------------------------------------
// criterion 1: serialization round trips

void criterion_round_trip() {
    Rng rng(0xC1);
    int checked_max = 0;
    for (int i = 0; i < 10000; ++i) {
        const int size = i == 0 ? 1 : i == 1 ? 120 : 1 + static_cast<int>(rng.below(120));
        checked_max = std::max(checked_max, size);
        MindNode t = test::random_tree(rng, size);
        require(parse_tokens(serialize_tokens(t)) == t, "token round trip failed");
        require(tree_from_json(nlohmann::json::parse(tree_to_json(t).dump())) == t,
                "json round trip failed");
    }
    require(checked_max == 120, "size coverage");
}

// criterion 2: zss vs exhaustive oracle, symmetry, triangle inequality

MindNode label_tree(Rng& rng, int size) {
    static const std::vector<std::string> labels = {"a", "b", "c"};
    struct Slot {
        std::string text;
        std::vector<int> kids;
    };
    std::vector<Slot> arena(static_cast<std::size_t>(size));
    for (auto& s : arena) s.text = rng.pick(labels);
    for (int i = 1; i < size; ++i)
        arena[rng.below(static_cast<std::uint64_t>(i))].kids.push_back(i);
    struct B {
        const std::vector<Slot>& arena;
        MindNode build(int i) const {
            MindNode n;
            n.text = arena[static_cast<std::size_t>(i)].text;
            for (int c : arena[static_cast<std::size_t>(i)].kids) n.children.push_back(build(c));
            return n;
        }
    };
    return B{arena}.build(0);
}

void criterion_zss_oracle() {
    Rng rng(0xC2);
    for (int i = 0; i < 500; ++i) {
        MindNode a = label_tree(rng, 1 + static_cast<int>(rng.below(6)));
        MindNode b = label_tree(rng, 1 + static_cast<int>(rng.below(6)));
        const int expected = test::ted_oracle(a, b, /*memoized=*/false);
        require(zss_ted(a, b) == expected, "zss disagrees with the brute-force oracle");
        require(zss_ted(b, a) == expected, "zss asymmetric");
    }
    for (int i = 0; i < 200; ++i) {
        MindNode a = label_tree(rng, 1 + static_cast<int>(rng.below(8)));
        MindNode b = label_tree(rng, 1 + static_cast<int>(rng.below(8)));
        MindNode c = label_tree(rng, 1 + static_cast<int>(rng.below(8)));
        require(zss_ted(a, c) <= zss_ted(a, b) + zss_ted(b, c), "triangle inequality violated");
    }
}

// criterion 3: metric formulas

void criterion_metric_formulas() {
    Rng rng(0xC3);
    // identical trees
    for (int i = 0; i < 50; ++i) {
        MindNode t = test::random_tree(rng, 1 + static_cast<int>(rng.below(30)));
        require(nted_accuracy(&t, t) == 1.0, "identical trees must score accuracy 1.0");
        Prf prf = field_f1(t, t);
        require(prf.f1 == 1.0 && prf.precision == 1.0 && prf.recall == 1.0,
                "identical trees must score F1 1.0");
    }
    // unparseable predictions
    for (const char* junk : {"", "I refuse.", "<html>x</html>", "s_n1 without brackets"}) {
        RepairResult r = repair_and_parse(junk);
        require(!r.tree.has_value(), "junk must not parse");
        MindNode gold = test::random_tree(rng, 5);
        require(nted_accuracy(nullptr, gold) == 0.0, "unparseable must score 0");
    }
    // single relabel in an n-node gold tree scores exactly 1 - 1/n
    for (int n = 2; n <= 20; ++n) {
        MindNode gold;
        do {
            gold = label_tree(rng, n);
        } while (tree_size(gold) != n);
        MindNode pred = gold;
        // relabel one node to a label not used anywhere in gold
        int target = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        int at = 0;
        visit_with_path(pred, [&](MindNode& x, const std::string&) {
            if (at++ == target) x.text = "zz_fresh";
        });
        require(test::ted_oracle(pred, gold, /*memoized=*/true) == 1,
                "oracle says relabel distance != 1");
        require(zss_ted(pred, gold) == 1, "zss says relabel distance != 1");
        const double accuracy = nted_accuracy(&pred, gold);
        require(std::abs(accuracy - (1.0 - 1.0 / n)) < 1e-12,
                "relabel accuracy differs from 1 - 1/n at n=" + std::to_string(n));
    }
}

// criterion 4: default sampler matches the reported synthetic averages

void criterion_sampler_averages() {
    SynthConfig cfg;
    double nodes = 0, depth = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(0xC4, static_cast<std::uint64_t>(i)));
        MindNode t = sample_tree(cfg, rng);
        nodes += tree_size(t);
        depth += tree_depth(t);
    }
    require_near(nodes / n, 16.0, 2.0, "mean node count");
    require_near(depth / n, 4.8, 0.5, "mean depth");
}

// criterion 5: default mixture ratios and language balance over 1000 instances

void criterion_mixture(const std::filesystem::path& scratch) {
    const auto out = scratch / "mix";
    const std::string engines =
        engine_dir().empty() ? "" : " --graphviz-bin " + engine_dir();
    // noise/backgrounds off: the tested properties are mixture and language
    require(run_cli("gen --count 1000 --seed 1005 --out " + out.string() + engines +
                        " --noise-min 0 --noise-max 0 --bg-min 0 --bg-max 0 --dpi 48",
                    scratch / "mix.log") == 0,
            "gen over 1000 instances failed");
    auto manifest = read_manifest(out / "manifest.jsonl");
    require(manifest.size() == 1000, "expected 1000 instances");
    std::map<Task, int> tasks;
    int en = 0;
    for (const auto& inst : manifest) {
        ++tasks[inst.task];
        if (inst.language == Language::en) ++en;
    }
    require(tasks[Task::full_parse] == 500 && tasks[Task::part_parse] == 100 &&
                tasks[Task::position_parse] == 100 && tasks[Task::structured_vqa] == 150 &&
                tasks[Task::position_vqa] == 150,
            "task ratios not exactly 0.50 : 0.10 : 0.10 : 0.15 : 0.15");
    require_near(en / 1000.0, 0.5, 0.02, "EN fraction");
}

// criterion 6: geometry soundness across all six engines

void criterion_geometry(const std::filesystem::path& scratch) {
    const std::vector<Image> backgrounds =
        load_backgrounds(std::filesystem::path(MINDKIT_DATA_DIR) / "backgrounds");
    require(!backgrounds.empty(), "bundled backgrounds missing");

    RenderOptions render_options;
    render_options.graphviz_dir = engine_dir();
    render_options.dpi = 96;

    SynthConfig cfg;
    cfg.node_count_min = 4;
    cfg.node_count_max = 24;
    const TextCorpus corpus_en = make_corpus(Language::en, 128);
    const TextCorpus corpus_cn = make_corpus(Language::cn, 128);

    std::vector<std::string> failures(200);
#pragma omp parallel for schedule(dynamic) num_threads(4)
    for (int i = 0; i < 200; ++i) {
        try {
            Rng rng(derive_seed(0xC6, static_cast<std::uint64_t>(i)));
            const Language lang = i % 2 ? Language::cn : Language::en;
            MindNode tree = sample_tree(cfg, rng);
            tree = sample_texts(std::move(tree), lang == Language::cn ? corpus_cn : corpus_en,
                                rng);
            StyleSpec style = sample_style(cfg, rng);
            style.engine = kLayoutEngines[static_cast<std::size_t>(i) % 6];

            RenderResult rendered = layout_and_render(emit_dot(tree, style), style.engine,
                                                      render_options);
            const int n = tree_size(tree);
            require(static_cast<int>(rendered.boxes.size()) == n, "box per node");
            auto original = rendered.boxes;
            const PixelBox image_box{0, 0, static_cast<double>(rendered.image.width),
                                     static_cast<double>(rendered.image.height)};
            for (const auto& [id, box] : rendered.boxes) {
                require(box.x1 <= box.x2 && box.y1 <= box.y2, "degenerate box");
                require(image_box.contains(box), "box outside image");
            }

            CompositeConfig composite;
            composite.background_count_min = 0;
            composite.background_count_max = 3;
            RenderResult composed =
                composite_background(std::move(rendered), backgrounds, rng, composite);
            // every box translated by one common offset; union box re-checked
            const double dx = composed.boxes.begin()->second.x1 -
                              original.begin()->second.x1;
            const double dy = composed.boxes.begin()->second.y1 -
                              original.begin()->second.y1;
            PixelBox union_before{1e30, 1e30, -1e30, -1e30};
            PixelBox union_after{1e30, 1e30, -1e30, -1e30};
            for (const auto& [id, box] : original) {
                const PixelBox& moved = composed.boxes.at(id);
                require(std::abs(moved.x1 - box.x1 - dx) < 1e-9 &&
                            std::abs(moved.y1 - box.y1 - dy) < 1e-9 &&
                            std::abs(moved.x2 - box.x2 - dx) < 1e-9 &&
                            std::abs(moved.y2 - box.y2 - dy) < 1e-9,
                        "inconsistent translation");
                union_before.x1 = std::min(union_before.x1, box.x1);
                union_before.y1 = std::min(union_before.y1, box.y1);
                union_before.x2 = std::max(union_before.x2, box.x2);
                union_before.y2 = std::max(union_before.y2, box.y2);
                union_after.x1 = std::min(union_after.x1, moved.x1);
                union_after.y1 = std::min(union_after.y1, moved.y1);
                union_after.x2 = std::max(union_after.x2, moved.x2);
                union_after.y2 = std::max(union_after.y2, moved.y2);
            }
            require(std::abs(union_after.x1 - union_before.x1 - dx) < 1e-9 &&
                        std::abs(union_after.y2 - union_before.y2 - dy) < 1e-9,
                    "union box not translated consistently");

            // normalized coordinates stay within [0, 999]
            MindMap map;
            visit_with_path(tree, [&](MindNode& nd, const std::string& path) {
                nd.box = composed.boxes.at("n" + path);
            });
            map.root = std::move(tree);
            map.language = lang;
            map.image_width = composed.image.width;
            map.image_height = composed.image.height;
            visit_with_path(map.root, [&](const MindNode& nd, const std::string&) {
                NormBox nb = normalize_box(*nd.box, map.image_width, map.image_height);
                require(nb.x1 >= 0 && nb.y1 >= 0 && nb.x2 <= 999 && nb.y2 <= 999 &&
                            nb.x1 <= nb.x2 && nb.y1 <= nb.y2,
                        "normalized box out of range");
            });

            // position-VQA answers against a brute-force scan
            for (int k = 0; k < 3; ++k) {
                Rng vqa_rng(derive_seed(0xC6C6, static_cast<std::uint64_t>(i * 16 + k)));
                TaskInstance inst = gen_position_vqa(map, vqa_rng);
                if (inst.question_family == "count_in_box") {
                    int count = 0;
                    visit_with_path(map.root, [&](const MindNode& nd, const std::string&) {
                        if (inst.query_box_px->contains(*nd.box)) ++count;
                    });
                    require(inst.answer == std::to_string(count),
                            "count answer disagrees with brute force");
                } else if (inst.question_family == "box_of_subgraph") {
                    const MindNode* x = quoted_node(map, inst.prompt);
                    require(inst.answer == bbox_literal(normalize_box(
                                               subtree_union(*x), map.image_width,
                                               map.image_height)),
                            "subgraph box disagrees with min/max recomputation");
                }
            }
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(i)] = e.what();
        }
    }
    (void)scratch;
    for (const auto& f : failures)
        if (!f.empty()) throw CheckFailure(f);
}

// criterion 7: generator self-consistency over 10,000 render-free instances

void criterion_generator_consistency() {
    const TextCorpus corpus_en = make_corpus(Language::en, 300);
    const TextCorpus corpus_cn = make_corpus(Language::cn, 300);
    SynthConfig cfg;
    cfg.node_count_min = 2;
    cfg.node_count_max = 120;
    cfg.max_depth = 10;
    cfg.max_children = 8;

    const std::array<Task, 5> tasks = {Task::full_parse, Task::part_parse,
                                       Task::position_parse, Task::structured_vqa,
                                       Task::position_vqa};
    int challenging_seen = 0;
    for (int i = 0; i < 10000; ++i) {
        Rng rng(derive_seed(0xC7, static_cast<std::uint64_t>(i)));
        MindMap map;
        map.language = i % 2 ? Language::cn : Language::en;
        map.root = sample_texts(sample_tree(cfg, rng),
                                map.language == Language::cn ? corpus_cn : corpus_en, rng);
        test::assign_fake_geometry(map); // rendering mocked with synthetic geometry
        TaskInstance inst = make_instance(map, tasks[static_cast<std::size_t>(i) % 5], rng);

        // the simple/challenging split obeys the 60-node rule
        require(inst.node_count == tree_size(map.root), "node_count meta");
        const auto meta = instance_to_json(inst)["meta"];
        require(meta.at("complexity") ==
                    (inst.node_count < 60 ? "simple" : "challenging"),
                "complexity tag violates the <60 rule");
        if (inst.node_count >= 60) ++challenging_seen;

        switch (inst.task) {
            case Task::full_parse: {
                require(parse_tokens(inst.answer) == map.root, "full parse round trip");
                break;
            }
            case Task::part_parse:
            case Task::position_parse: {
                MindNode answer = parse_tokens(inst.answer);
                const MindNode* in_map = find_subtree(map.root, answer.text).node;
                require(*in_map == answer, "parse answer is not the map subtree");
                if (inst.task == Task::position_parse) {
                    auto box = find_bbox_literal(inst.prompt);
                    require(box.has_value() &&
                                *box == normalize_box(*in_map->box, map.image_width,
                                                      map.image_height),
                            "position prompt box mismatch");
                }
                break;
            }
            case Task::structured_vqa: {
                const std::string& family = inst.question_family;
                if (family == "central_theme") {
                    require(inst.answer == map.root.text, "central theme answer");
                } else if (family == "total_count") {
                    require(inst.answer == std::to_string(tree_size(map.root)),
                            "total count answer");
                } else {
                    const MindNode* x = quoted_node(map, inst.prompt);
                    if (family == "children_of") {
                        std::string joined;
                        for (const auto& c : x->children) {
                            if (!joined.empty()) joined += ", ";
                            joined += c.text;
                        }
                        require(inst.answer == joined, "children answer");
                    } else if (family == "node_depth") {
                        int depth = 0, at = 1;
                        std::function<bool(const MindNode&, int)> walk =
                            [&](const MindNode& nd, int d) {
                                if (&nd == x) {
                                    depth = d;
                                    return true;
                                }
                                for (const auto& c : nd.children)
                                    if (walk(c, d + 1)) return true;
                                return false;
                            };
                        walk(map.root, at);
                        require(inst.answer == std::to_string(depth), "depth answer");
                    } else if (family == "parent_of" || family == "sibling_count") {
                        const MindNode* parent = nullptr;
                        std::function<void(const MindNode&)> find =
                            [&](const MindNode& nd) {
                                for (const auto& c : nd.children) {
                                    if (&c == x) parent = &nd;
                                    find(c);
                                }
                            };
                        find(map.root);
                        require(parent != nullptr, "picked node has no parent");
                        if (family == "parent_of")
                            require(inst.answer == parent->text, "parent answer");
                        else
                            require(inst.answer ==
                                        std::to_string(parent->children.size() - 1),
                                    "sibling count answer");
                    }
                }
                break;
            }
            case Task::position_vqa: {
                const std::string& family = inst.question_family;
                if (family == "count_in_box") {
                    int count = 0;
                    visit_with_path(map.root, [&](const MindNode& nd, const std::string&) {
                        if (inst.query_box_px->contains(*nd.box)) ++count;
                    });
                    require(inst.answer == std::to_string(count) && count >= 1,
                            "count_in_box answer");
                } else if (family == "text_at_box") {
                    auto box = find_bbox_literal(inst.prompt);
                    bool matched = false;
                    visit_with_path(map.root, [&](const MindNode& nd, const std::string&) {
                        if (nd.text == inst.answer &&
                            *box == normalize_box(*nd.box, map.image_width,
                                                  map.image_height))
                            matched = true;
                    });
                    require(matched, "text_at_box answer");
                } else if (family == "box_of_node") {
                    const MindNode* x = quoted_node(map, inst.prompt);
                    require(inst.answer ==
                                bbox_literal(normalize_box(*x->box, map.image_width,
                                                           map.image_height)),
                            "box_of_node answer");
                } else {
                    const MindNode* x = quoted_node(map, inst.prompt);
                    require(inst.answer ==
                                bbox_literal(normalize_box(subtree_union(*x),
                                                           map.image_width,
                                                           map.image_height)),
                            "box_of_subgraph answer");
                }
                break;
            }
        }
    }
    require(challenging_seen > 100, "challenging maps under-sampled");
}

// criterion 8: end-to-end determinism

void criterion_determinism(const std::filesystem::path& scratch) {
    const std::string engines =
        engine_dir().empty() ? "" : " --graphviz-bin " + engine_dir();
    const auto a = scratch / "det-a", b = scratch / "det-b";
    require(run_cli("gen --count 40 --seed 777 --out " + a.string() + engines,
                    scratch / "det-a.log") == 0,
            "first gen failed");
    require(run_cli("gen --count 40 --seed 777 --out " + b.string() + engines,
                    scratch / "det-b.log") == 0,
            "second gen failed");
    require(slurp(a / "manifest.jsonl") == slurp(b / "manifest.jsonl"),
            "manifests differ between identical runs");
    require(slurp(a / "maps.jsonl") == slurp(b / "maps.jsonl"),
            "map records differ between identical runs");

    // eval on a shuffled predictions file must give byte-identical reports
    auto manifest = read_manifest(a / "manifest.jsonl");
    std::vector<PredictionRecord> predictions;
    Rng rng(3);
    for (const auto& inst : manifest) {
        std::string output = inst.answer;
        if (rng.chance(0.3)) output = "noise " + output;
        if (rng.chance(0.2)) output = "";
        predictions.push_back({inst.id, output});
    }
    auto write_predictions = [](const std::vector<PredictionRecord>& records,
                                const std::filesystem::path& path) {
        std::ofstream out(path, std::ios::binary);
        for (const auto& r : records) {
            nlohmann::ordered_json j;
            j["id"] = r.id;
            j["output"] = r.output;
            out << j.dump() << "\n";
        }
    };
    write_predictions(predictions, scratch / "preds-1.jsonl");
    std::reverse(predictions.begin(), predictions.end());
    write_predictions(predictions, scratch / "preds-2.jsonl");
    require(run_cli("eval --manifest " + (a / "manifest.jsonl").string() + " --predictions " +
                        (scratch / "preds-1.jsonl").string() + " --out " +
                        (scratch / "rep-1").string(),
                    scratch / "eval-1.log") == 0,
            "eval 1 failed");
    require(run_cli("eval --manifest " + (a / "manifest.jsonl").string() + " --predictions " +
                        (scratch / "preds-2.jsonl").string() + " --out " +
                        (scratch / "rep-2").string(),
                    scratch / "eval-2.log") == 0,
            "eval 2 failed");
    require(slurp(scratch / "rep-1/report.json") == slurp(scratch / "rep-2/report.json"),
            "reports differ across prediction orders");
    require(slurp(scratch / "rep-1/report.txt") == slurp(scratch / "rep-2/report.txt"),
            "report tables differ across prediction orders");
}

// criterion 9: hand-scored golden fixture

struct GoldenSample {
    TaskInstance instance;
    std::string output;
    double accuracy = -1; // -1: VQA row without accuracy
    double precision, recall, f1;
    bool parse_ok;
    double aux_iou = -1;
};

void criterion_golden() {
    std::vector<GoldenSample> fixture;
    auto parse_inst = [](std::string id, Task task, const MindNode& gold) {
        TaskInstance inst;
        inst.id = std::move(id);
        inst.task = task;
        inst.answer = serialize_tokens(gold);
        inst.node_count = tree_size(gold);
        return inst;
    };
    auto vqa_inst = [](std::string id, std::string answer, Language lang,
                       std::string family = "central_theme") {
        TaskInstance inst;
        inst.id = std::move(id);
        inst.task = family.rfind("box_", 0) == 0 || family == "count_in_box"
                        ? Task::position_vqa
                        : Task::structured_vqa;
        inst.language = lang;
        inst.question_family = std::move(family);
        inst.answer = std::move(answer);
        return inst;
    };

    const MindNode g1 = node("R", {leaf("a"), leaf("b")});
    const MindNode g2 = node("R", {leaf("a"), leaf("b"), leaf("c"), leaf("d")});
    const MindNode g5 = node("a", {leaf("c")});
    const MindNode g6 = node("a", {leaf("c"), leaf("d")});

    // 1) exact full parse: everything 1.0
    fixture.push_back({parse_inst("s01", Task::full_parse, g1), serialize_tokens(g1), 1.0, 1.0,
                       1.0, 1.0, true, -1});
    // 2) one relabel in a 5-node tree: accuracy 0.8; fields 4/5 -> P=R=F1=0.8
    {
        MindNode pred = g2;
        pred.children[0].text = "x";
        fixture.push_back({parse_inst("s02", Task::full_parse, g2), serialize_tokens(pred), 0.8,
                           0.8, 0.8, 0.8, true, -1});
    }
    // 3) refusal text: zero scores, parse failed
    fixture.push_back({parse_inst("s03", Task::full_parse, g2), "I cannot parse this image.",
                       0.0, 0.0, 0.0, 0.0, false, -1});
    // 4) empty output: zero scores
    fixture.push_back({parse_inst("s04", Task::full_parse, g1), "", 0.0, 0.0, 0.0, 0.0, false,
                       -1});
    // 5) truncated part parse repaired via auto-close: perfect scores, repair flagged
    fixture.push_back({parse_inst("s05", Task::part_parse, g5),
                       "<s_n1><s_text>a</s_text><s_n1_1><s_text>c</s_text>", 1.0, 1.0, 1.0,
                       1.0, false, -1});
    // 6) partial tree, one child missing: ted 1, n=3 -> accuracy 2/3; P=1, R=2/3, F1=0.8
    fixture.push_back({parse_inst("s06", Task::part_parse, g6), serialize_tokens(g5),
                       2.0 / 3.0, 1.0, 2.0 / 3.0, 0.8, true, -1});
    // 7) EN VQA, word order ignored by the bag model
    fixture.push_back({vqa_inst("s07", "alpha beta", Language::en), "beta alpha", -1, 1.0, 1.0,
                       1.0, true, -1});
    // 8) EN VQA, disjoint tokens
    fixture.push_back({vqa_inst("s08", "4", Language::en), "four", -1, 0.0, 0.0, 0.0, true,
                       -1});
    // 9) CN VQA, character tokens: P=1, R=3/4, F1=6/7
    fixture.push_back({vqa_inst("s09", "第一季度", Language::cn), "第一季", -1, 1.0, 0.75,
                       6.0 / 7.0, true, -1});
    // 10) CN grounding: 3 of 4 integers match -> P=R=F1=0.75; IoU 0.5
    fixture.push_back({vqa_inst("s10", "<bbox>10,20,110,220</bbox>", Language::cn,
                                "box_of_node"),
                       "<bbox>10,20,110,120</bbox>", -1, 0.75, 0.75, 0.75, true, 0.5});

    std::vector<TaskInstance> manifest;
    std::vector<PredictionRecord> predictions;
    for (const auto& g : fixture) {
        manifest.push_back(g.instance);
        predictions.push_back({g.instance.id, g.output});
    }
    EvalReport report = evaluate_run(manifest, predictions);
    require(report.samples.size() == fixture.size(), "sample count");
    for (std::size_t i = 0; i < fixture.size(); ++i) {
        const GoldenSample& want = fixture[i];
        const SampleScore& got = report.samples[i];
        const std::string tag = "sample " + want.instance.id;
        if (want.accuracy >= 0)
            require(std::abs(got.accuracy - want.accuracy) < 1e-12, tag + " accuracy");
        require(std::abs(got.precision - want.precision) < 1e-12, tag + " precision");
        require(std::abs(got.recall - want.recall) < 1e-12, tag + " recall");
        require(std::abs(got.f1 - want.f1) < 1e-12, tag + " f1");
        require(got.parse_ok == want.parse_ok, tag + " parse_ok");
        if (want.aux_iou >= 0)
            require(got.aux_iou.has_value() && std::abs(*got.aux_iou - want.aux_iou) < 1e-12,
                    tag + " iou");
    }
    // aggregates equal the hand-computed means
    require_near(report.overall.accuracy, (1.0 + 0.8 + 0 + 0 + 1.0 + 2.0 / 3.0) / 6.0, 1e-12,
                 "overall accuracy mean");
    require_near(report.overall.f1,
                 (1.0 + 0.8 + 0 + 0 + 1.0 + 0.8 + 1.0 + 0 + 6.0 / 7.0 + 0.75) / 10.0, 1e-12,
                 "overall f1 mean");
}

struct Criterion {
    int id;
    const char* title;
    double time_cap_sec; // 0: none stated
    std::function<void()> run;
};

} // namespace

int main() {
    test::ScratchDir scratch("acceptance");
    std::printf("layout engines: %s\n", engine_note().c_str());

    const std::vector<Criterion> criteria = {
        {1, "round-trip over 10,000 random trees (tokens + json)", 30.0,
         [] { criterion_round_trip(); }},
        {2, "zss agrees with the brute-force oracle; metric axioms", 120.0,
         [] { criterion_zss_oracle(); }},
        {3, "metric formulas: identity, unparseable, 1 - 1/n relabel", 0.0,
         [] { criterion_metric_formulas(); }},
        {4, "default sampler: mean nodes 16 +- 2, mean depth 4.8 +- 0.5", 60.0,
         [] { criterion_sampler_averages(); }},
        {5, "default mixture ratios exact, EN share 0.50 +- 0.02", 0.0,
         [&] { criterion_mixture(scratch.path); }},
        {6, "geometry soundness across all six engines (200 maps)", 600.0,
         [&] { criterion_geometry(scratch.path); }},
        {7, "generator self-consistency over 10,000 instances", 120.0,
         [] { criterion_generator_consistency(); }},
        {8, "byte-identical manifests and reports across reruns", 0.0,
         [&] { criterion_determinism(scratch.path); }},
        {9, "hand-scored 10-sample golden fixture", 0.0, [] { criterion_golden(); }},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        const double t0 = omp_get_wtime();
        std::string error;
        try {
            criterion.run();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double elapsed = omp_get_wtime() - t0;
        if (error.empty() && criterion.time_cap_sec > 0 && elapsed > criterion.time_cap_sec)
            error = "runtime " + std::to_string(elapsed) + "s exceeds the " +
                    std::to_string(criterion.time_cap_sec) + "s cap";
        if (error.empty()) {
            std::printf("[PASS] criterion %d: %s (%.1fs)\n", criterion.id, criterion.title,
                        elapsed);
        } else {
            std::printf("[FAIL] criterion %d: %s (%.1fs)\n       %s\n", criterion.id,
                        criterion.title, elapsed, error.c_str());
            ++failed;
        }
        std::fflush(stdout);
    }
    if (failed == 0) std::printf("all %zu criteria passed\n", criteria.size());
    else std::printf("%d criteria FAILED\n", failed);
    return failed;
}
