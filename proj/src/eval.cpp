#include "mindkit/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mindkit/errors.hpp"
#include "mindkit/fields.hpp"
#include "mindkit/tokens.hpp"
#include "mindkit/utf8.hpp"

namespace mindkit {

namespace {

// Postorder flattening for the Zhang-Shasha program.
struct ZssIndex {
    std::vector<const std::string*> labels; // postorder
    std::vector<int> lml;                   // leftmost leaf of each postorder node
    std::vector<int> keyroots;              // ascending
};

int zss_flatten(const MindNode& node, ZssIndex& out) {
    int first_leaf = -1;
    for (const auto& child : node.children) {
        int leaf = zss_flatten(child, out);
        if (first_leaf < 0) first_leaf = leaf;
    }
    out.labels.push_back(&node.text);
    int self = static_cast<int>(out.labels.size()) - 1;
    out.lml.push_back(first_leaf < 0 ? self : first_leaf);
    return out.lml.back();
}

ZssIndex zss_index(const MindNode& root) {
    ZssIndex idx;
    zss_flatten(root, idx);
    // keyroots: for each leftmost-leaf value, the highest postorder node
    std::map<int, int> highest;
    for (int i = 0; i < static_cast<int>(idx.lml.size()); ++i) highest[idx.lml[i]] = i;
    for (const auto& [leaf, node] : highest) idx.keyroots.push_back(node);
    std::sort(idx.keyroots.begin(), idx.keyroots.end());
    return idx;
}

} // namespace

int zss_ted(const MindNode& a, const MindNode& b) {
    const ZssIndex ta = zss_index(a);
    const ZssIndex tb = zss_index(b);
    const int n = static_cast<int>(ta.labels.size());
    const int m = static_cast<int>(tb.labels.size());

    std::vector<std::vector<int>> dist(n, std::vector<int>(m, 0));
    std::vector<std::vector<int>> fd(static_cast<std::size_t>(n) + 1,
                                     std::vector<int>(static_cast<std::size_t>(m) + 1, 0));

    for (int i : ta.keyroots) {
        for (int j : tb.keyroots) {
            const int li = ta.lml[i], lj = tb.lml[j];
            fd[0][0] = 0;
            for (int x = li; x <= i; ++x) fd[x - li + 1][0] = fd[x - li][0] + 1;
            for (int y = lj; y <= j; ++y) fd[0][y - lj + 1] = fd[0][y - lj] + 1;
            for (int x = li; x <= i; ++x) {
                for (int y = lj; y <= j; ++y) {
                    const int fx = x - li + 1, fy = y - lj + 1;
                    if (ta.lml[x] == li && tb.lml[y] == lj) {
                        const int rename = *ta.labels[x] == *tb.labels[y] ? 0 : 1;
                        fd[fx][fy] = std::min({fd[fx - 1][fy] + 1, fd[fx][fy - 1] + 1,
                                               fd[fx - 1][fy - 1] + rename});
                        dist[x][y] = fd[fx][fy];
                    } else {
                        fd[fx][fy] = std::min({fd[fx - 1][fy] + 1, fd[fx][fy - 1] + 1,
                                               fd[ta.lml[x] - li][tb.lml[y] - lj] + dist[x][y]});
                    }
                }
            }
        }
    }
    return dist[n - 1][m - 1];
}

double nted_accuracy(const MindNode* pred, const MindNode& gold) {
    if (!pred) return 0.0;
    const double nted = static_cast<double>(zss_ted(*pred, gold)) / tree_size(gold);
    return std::max(1.0 - nted, 0.0);
}

Prf field_f1(const MindNode& pred, const MindNode& gold) {
    const FieldMultiset fp = flatten_fields(pred);
    const FieldMultiset fg = flatten_fields(gold);
    const auto tp = static_cast<double>(field_overlap(fp, fg));
    Prf out;
    if (tp == 0) return out;
    out.precision = tp / static_cast<double>(field_count(fp));
    out.recall = tp / static_cast<double>(field_count(fg));
    out.f1 = 2 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

namespace {

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

RepairResult repair_and_parse(std::string_view output) {
    const std::string_view trimmed = trim_view(output);
    try {
        return {parse_tokens(trimmed), true};
    } catch (const MalformedSequence&) {
    }

    std::size_t start = trimmed.find("<s_n1>");
    if (start == std::string_view::npos) return {std::nullopt, false};
    std::string_view body = trimmed.substr(start);

    // Cut after the last closing tag, if any prose follows it.
    std::size_t last_close = body.rfind("</s_");
    if (last_close != std::string_view::npos) {
        std::size_t gt = body.find('>', last_close);
        if (gt != std::string_view::npos) body = body.substr(0, gt + 1);
    }
    // Drop a trailing half-written tag.
    std::size_t last_lt = body.rfind('<');
    if (last_lt != std::string_view::npos && body.find('>', last_lt) == std::string_view::npos)
        body = body.substr(0, last_lt);

    return {parse_tokens_lenient(body), false};
}

namespace {

bool is_cjk_punct(char32_t cp) {
    return (cp >= 0x3000 && cp <= 0x303f) || (cp >= 0xff00 && cp <= 0xff0f) ||
           (cp >= 0xff1a && cp <= 0xff20) || (cp >= 0xff3b && cp <= 0xff40) ||
           (cp >= 0xff5b && cp <= 0xff65) || cp == 0x2018 || cp == 0x2019 || cp == 0x201c ||
           cp == 0x201d;
}

bool is_ascii_punct(char32_t cp) {
    return cp < 0x80 && std::ispunct(static_cast<int>(cp));
}

void tokenize_text(std::string_view text, Language lang, std::vector<std::string>& out) {
    if (lang == Language::cn) {
        std::size_t pos = 0;
        while (pos < text.size()) {
            char32_t cp = utf8_next(text, pos);
            if (is_space_cp(cp) || is_ascii_punct(cp) || is_cjk_punct(cp)) continue;
            std::string token;
            utf8_append(token, cp);
            out.push_back(std::move(token));
        }
        return;
    }
    std::string word;
    std::size_t pos = 0;
    auto flush = [&] {
        if (!word.empty()) out.push_back(std::move(word));
        word.clear();
    };
    while (pos < text.size()) {
        char32_t cp = utf8_next(text, pos);
        if (is_space_cp(cp)) {
            flush();
        } else if (is_ascii_punct(cp) || is_cjk_punct(cp)) {
            // punctuation stripped, never part of a word
        } else {
            if (cp < 0x80) cp = static_cast<char32_t>(std::tolower(static_cast<int>(cp)));
            utf8_append(word, cp);
        }
    }
    flush();
}

std::vector<std::string> vqa_tokens(std::string_view text, Language lang) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t open = text.find("<bbox>", pos);
        if (open == std::string_view::npos) break;
        std::size_t close = text.find("</bbox>", open);
        auto box = close == std::string_view::npos
                       ? std::nullopt
                       : parse_bbox_literal(text.substr(open, close + 7 - open));
        if (!box) {
            tokenize_text(text.substr(pos, open + 6 - pos), lang, tokens);
            pos = open + 6;
            continue;
        }
        tokenize_text(text.substr(pos, open - pos), lang, tokens);
        for (int v : {box->x1, box->y1, box->x2, box->y2}) tokens.push_back(std::to_string(v));
        pos = close + 7;
    }
    tokenize_text(text.substr(pos), lang, tokens);
    return tokens;
}

} // namespace

Prf vqa_f1_scores(std::string_view pred, std::string_view gold, Language lang) {
    auto pt = vqa_tokens(pred, lang);
    auto gt = vqa_tokens(gold, lang);
    if (pt.empty() && gt.empty()) {
        const bool same = trim_view(pred) == trim_view(gold);
        return {same ? 1.0 : 0.0, same ? 1.0 : 0.0, same ? 1.0 : 0.0};
    }
    std::map<std::string, int> counts;
    for (const auto& t : gt) ++counts[t];
    double tp = 0;
    for (const auto& t : pt) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++tp;
        }
    }
    Prf out;
    if (tp == 0) return out;
    out.precision = tp / static_cast<double>(pt.size());
    out.recall = tp / static_cast<double>(gt.size());
    out.f1 = 2 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

double vqa_f1(std::string_view pred, std::string_view gold, Language lang) {
    return vqa_f1_scores(pred, gold, lang).f1;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<PredictionRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("output") ||
            !j["id"].is_string() || !j["output"].is_string())
            throw SchemaError(path.string() + ":" + std::to_string(line_no) +
                              ": expected {\"id\": ..., \"output\": ...}");
        records.push_back({j["id"].get<std::string>(), j["output"].get<std::string>()});
    }
    return records;
}

namespace {

bool is_parse_task(Task task) {
    return task == Task::full_parse || task == Task::part_parse ||
           task == Task::position_parse;
}

bool is_grounding_family(const std::string& family) {
    return family == "box_of_node" || family == "box_of_subgraph";
}

double box_iou(const NormBox& a, const NormBox& b) {
    const double ix = std::max(0.0, static_cast<double>(std::min(a.x2, b.x2) - std::max(a.x1, b.x1)));
    const double iy = std::max(0.0, static_cast<double>(std::min(a.y2, b.y2) - std::max(a.y1, b.y1)));
    const double inter = ix * iy;
    const double area_a = static_cast<double>(a.x2 - a.x1) * (a.y2 - a.y1);
    const double area_b = static_cast<double>(b.x2 - b.x1) * (b.y2 - b.y1);
    const double uni = area_a + area_b - inter;
    return uni <= 0 ? 0.0 : inter / uni;
}

SampleScore score_sample(const TaskInstance& inst, const std::string* output) {
    SampleScore s;
    s.id = inst.id;
    s.task = inst.task;
    s.language = inst.language;
    s.source = inst.source;
    s.challenging = is_challenging(inst.node_count);

    if (!output) {
        s.missing = true;
        return s;
    }

    if (is_parse_task(inst.task)) {
        const MindNode gold = parse_tokens(inst.answer); // generator-guaranteed well-formed
        s.gold_tree_size = tree_size(gold);
        RepairResult repair = repair_and_parse(*output);
        s.parse_ok = repair.parse_ok;
        if (repair.tree) {
            s.ted = zss_ted(*repair.tree, gold);
            s.nted = static_cast<double>(*s.ted) / s.gold_tree_size;
            s.accuracy = std::max(1.0 - *s.nted, 0.0);
            Prf prf = field_f1(*repair.tree, gold);
            s.precision = prf.precision;
            s.recall = prf.recall;
            s.f1 = prf.f1;
        }
        return s;
    }

    s.parse_ok = true;
    Prf prf = vqa_f1_scores(*output, inst.answer, inst.language);
    s.precision = prf.precision;
    s.recall = prf.recall;
    s.f1 = prf.f1;
    if (is_grounding_family(inst.question_family)) {
        auto pred_box = find_bbox_literal(*output);
        auto gold_box = find_bbox_literal(inst.answer);
        s.aux_iou = (pred_box && gold_box) ? box_iou(*pred_box, *gold_box) : 0.0;
    }
    return s;
}

void accumulate(Aggregate& agg, const SampleScore& s) {
    ++agg.n;
    if (s.missing) ++agg.n_missing;
    agg.precision += s.precision;
    agg.recall += s.recall;
    agg.f1 += s.f1;
    if (is_parse_task(s.task)) {
        ++agg.n_parse;
        agg.accuracy += s.accuracy;
    }
}

void finalize(Aggregate& agg) {
    if (agg.n > 0) {
        agg.precision /= agg.n;
        agg.recall /= agg.n;
        agg.f1 /= agg.n;
    }
    if (agg.n_parse > 0) agg.accuracy /= agg.n_parse;
}

template <class Key>
std::vector<std::pair<std::string, Aggregate>> bucket_means(
    const std::vector<SampleScore>& samples, const std::vector<Key>& key_order,
    const std::function<Key(const SampleScore&)>& key_of,
    const std::function<std::string(const Key&)>& key_name) {
    std::vector<std::pair<std::string, Aggregate>> out;
    for (const Key& key : key_order) {
        Aggregate agg;
        for (const auto& s : samples)
            if (key_of(s) == key) accumulate(agg, s);
        if (agg.n == 0) continue;
        finalize(agg);
        out.emplace_back(key_name(key), agg);
    }
    return out;
}

EvalReport evaluate_impl(const std::vector<TaskInstance>& manifest,
                         const std::vector<PredictionRecord>& predictions, bool parallel) {
    std::map<std::string, const TaskInstance*> by_id;
    for (const auto& inst : manifest) {
        if (!by_id.emplace(inst.id, &inst).second)
            throw SchemaError("duplicate manifest id: " + inst.id);
    }
    std::map<std::string, const std::string*> outputs;
    for (const auto& pred : predictions) {
        if (!by_id.count(pred.id)) throw UnknownId("prediction id not in manifest: " + pred.id);
        if (!outputs.emplace(pred.id, &pred.output).second)
            throw SchemaError("duplicate prediction id: " + pred.id);
    }

    EvalReport report;
    report.samples.resize(manifest.size());
    std::string first_error;
    const auto score_at = [&](std::size_t i) {
        try {
            auto it = outputs.find(manifest[i].id);
            report.samples[i] =
                score_sample(manifest[i], it == outputs.end() ? nullptr : it->second);
        } catch (const std::exception& e) {
            // exceptions must not escape the parallel region
#pragma omp critical(mindkit_eval_error)
            if (first_error.empty())
                first_error = "scoring " + manifest[i].id + ": " + e.what();
        }
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::size_t i = 0; i < manifest.size(); ++i) score_at(i);
    } else {
        for (std::size_t i = 0; i < manifest.size(); ++i) score_at(i);
    }
    if (!first_error.empty()) throw Error(first_error);

    // Fixed-order sequential reduction keeps the report bit-identical
    // regardless of the scoring schedule.
    for (const auto& s : report.samples) accumulate(report.overall, s);
    finalize(report.overall);

    report.by_task = bucket_means<Task>(
        report.samples,
        {Task::full_parse, Task::part_parse, Task::position_parse, Task::structured_vqa,
         Task::position_vqa},
        [](const SampleScore& s) { return s.task; }, [](const Task& t) { return task_name(t); });
    report.by_source = bucket_means<MapSource>(
        report.samples, {MapSource::synthetic, MapSource::ingested},
        [](const SampleScore& s) { return s.source; },
        [](const MapSource& src) { return to_string(src); });
    report.by_language = bucket_means<Language>(
        report.samples, {Language::en, Language::cn},
        [](const SampleScore& s) { return s.language; },
        [](const Language& lang) { return to_string(lang); });
    report.by_complexity = bucket_means<bool>(
        report.samples, {false, true}, [](const SampleScore& s) { return s.challenging; },
        [](const bool& hard) { return std::string(hard ? "challenging" : "simple"); });
    return report;
}

} // namespace

EvalReport evaluate_run(const std::vector<TaskInstance>& manifest,
                        const std::vector<PredictionRecord>& predictions) {
    return evaluate_impl(manifest, predictions, true);
}

EvalReport evaluate_run_serial(const std::vector<TaskInstance>& manifest,
                               const std::vector<PredictionRecord>& predictions) {
    return evaluate_impl(manifest, predictions, false);
}

namespace {

nlohmann::ordered_json aggregate_to_json(const Aggregate& agg) {
    nlohmann::ordered_json j;
    j["n"] = agg.n;
    j["n_parse"] = agg.n_parse;
    j["n_missing"] = agg.n_missing;
    j["accuracy"] = agg.accuracy;
    j["precision"] = agg.precision;
    j["recall"] = agg.recall;
    j["f1"] = agg.f1;
    return j;
}

} // namespace

nlohmann::ordered_json report_to_json(const EvalReport& report) {
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    for (const auto& s : report.samples) {
        nlohmann::ordered_json j;
        j["id"] = s.id;
        j["task"] = task_name(s.task);
        j["missing"] = s.missing;
        j["parse_ok"] = s.parse_ok;
        if (s.ted) {
            j["ted"] = *s.ted;
            j["n"] = s.gold_tree_size;
            j["nted"] = *s.nted;
        } else if (is_parse_task(s.task)) {
            j["ted"] = nullptr;
            j["n"] = s.gold_tree_size;
            j["nted"] = nullptr;
        }
        if (is_parse_task(s.task)) j["accuracy"] = s.accuracy;
        j["precision"] = s.precision;
        j["recall"] = s.recall;
        j["f1"] = s.f1;
        if (s.aux_iou) j["aux_iou"] = *s.aux_iou;
        samples.push_back(std::move(j));
    }
    nlohmann::ordered_json aggregates;
    aggregates["overall"] = aggregate_to_json(report.overall);
    for (const auto& [name, buckets] :
         std::initializer_list<std::pair<const char*,
                                         const std::vector<std::pair<std::string, Aggregate>>*>>{
             {"by_task", &report.by_task},
             {"by_source", &report.by_source},
             {"by_language", &report.by_language},
             {"by_complexity", &report.by_complexity}}) {
        nlohmann::ordered_json group;
        for (const auto& [key, agg] : *buckets) group[key] = aggregate_to_json(agg);
        aggregates[name] = std::move(group);
    }
    nlohmann::ordered_json j;
    j["samples"] = std::move(samples);
    j["aggregates"] = std::move(aggregates);
    return j;
}

std::string report_to_table(const EvalReport& report) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-24s %6s %6s %9s %9s %9s %9s %8s\n", "bucket", "n",
                  "miss", "accuracy", "precision", "recall", "f1", "parse_ok");
    out << line;
    auto row = [&](const std::string& name, const Aggregate& agg, long parse_ok_count) {
        std::string acc = agg.n_parse > 0 ? [&] {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%9.4f", agg.accuracy);
            return std::string(buf);
        }() : std::string(9, ' ').replace(8, 1, "-");
        std::snprintf(line, sizeof line, "%-24s %6d %6d %9s %9.4f %9.4f %9.4f %7ld%%\n",
                      name.c_str(), agg.n, agg.n_missing, acc.c_str(), agg.precision, agg.recall,
                      agg.f1, agg.n > 0 ? parse_ok_count * 100 / agg.n : 0);
        out << line;
    };
    auto parse_ok_in = [&](auto pred) {
        long count = 0;
        for (const auto& s : report.samples)
            if (pred(s) && s.parse_ok) ++count;
        return count;
    };
    for (const auto& [name, agg] : report.by_task) {
        row("task/" + name, agg, parse_ok_in([&, n = name](const SampleScore& s) {
                return task_name(s.task) == n;
            }));
    }
    for (const auto& [name, agg] : report.by_source)
        row("source/" + name, agg, parse_ok_in([&, n = name](const SampleScore& s) {
                return to_string(s.source) == n;
            }));
    for (const auto& [name, agg] : report.by_language)
        row("language/" + name, agg, parse_ok_in([&, n = name](const SampleScore& s) {
                return to_string(s.language) == n;
            }));
    for (const auto& [name, agg] : report.by_complexity)
        row("complexity/" + name, agg, parse_ok_in([&, n = name](const SampleScore& s) {
                return (s.challenging ? "challenging" : "simple") == n;
            }));
    row("overall", report.overall,
        parse_ok_in([](const SampleScore&) { return true; }));
    return out.str();
}

} // namespace mindkit
