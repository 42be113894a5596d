#include "mindkit/tasks.hpp"

#include <algorithm>
#include <cstdio>

#include "mindkit/errors.hpp"
#include "mindkit/render.hpp"
#include "mindkit/tokens.hpp"

namespace mindkit {

const char* kTemplateVersion = "v1";

std::string task_name(Task task) {
    switch (task) {
        case Task::full_parse: return "full_parse";
        case Task::part_parse: return "part_parse";
        case Task::position_parse: return "position_parse";
        case Task::structured_vqa: return "structured_vqa";
        case Task::position_vqa: return "position_vqa";
    }
    throw Error("bad task enum");
}

Task task_from_name(std::string_view name) {
    if (name == "full_parse") return Task::full_parse;
    if (name == "part_parse") return Task::part_parse;
    if (name == "position_parse") return Task::position_parse;
    if (name == "structured_vqa") return Task::structured_vqa;
    if (name == "position_vqa") return Task::position_vqa;
    throw SchemaError("unknown task: " + std::string(name));
}

std::string bbox_literal(const NormBox& box) {
    return "<bbox>" + std::to_string(box.x1) + "," + std::to_string(box.y1) + "," +
           std::to_string(box.x2) + "," + std::to_string(box.y2) + "</bbox>";
}

std::optional<NormBox> parse_bbox_literal(std::string_view text) {
    constexpr std::string_view open = "<bbox>", close = "</bbox>";
    if (text.substr(0, open.size()) != open) return std::nullopt;
    if (text.size() < open.size() + close.size()) return std::nullopt;
    if (text.substr(text.size() - close.size()) != close) return std::nullopt;
    std::string_view inner =
        text.substr(open.size(), text.size() - open.size() - close.size());
    int vals[4];
    int field = 0;
    std::size_t pos = 0;
    while (field < 4) {
        while (pos < inner.size() && inner[pos] == ' ') ++pos;
        bool neg = pos < inner.size() && inner[pos] == '-';
        if (neg) ++pos;
        if (pos >= inner.size() || !std::isdigit(static_cast<unsigned char>(inner[pos])))
            return std::nullopt;
        long v = 0;
        while (pos < inner.size() && std::isdigit(static_cast<unsigned char>(inner[pos]))) {
            v = v * 10 + (inner[pos] - '0');
            if (v > 1'000'000) return std::nullopt;
            ++pos;
        }
        vals[field++] = static_cast<int>(neg ? -v : v);
        while (pos < inner.size() && inner[pos] == ' ') ++pos;
        if (field < 4) {
            if (pos >= inner.size() || inner[pos] != ',') return std::nullopt;
            ++pos;
        }
    }
    if (pos != inner.size()) return std::nullopt;
    return NormBox{vals[0], vals[1], vals[2], vals[3]};
}

std::optional<NormBox> find_bbox_literal(std::string_view text) {
    std::size_t start = 0;
    while ((start = text.find("<bbox>", start)) != std::string_view::npos) {
        std::size_t end = text.find("</bbox>", start);
        if (end == std::string_view::npos) return std::nullopt;
        auto box = parse_bbox_literal(text.substr(start, end + 7 - start));
        if (box) return box;
        start = end + 7;
    }
    return std::nullopt;
}

const std::array<double, kTaskCount>& MixtureConfig::default_weights() {
    static const std::array<double, kTaskCount> w = {0.50, 0.10, 0.10, 0.15, 0.15};
    return w;
}

MixtureConfig MixtureConfig::from_total(int total, const std::array<double, kTaskCount>& weights) {
    double sum = 0;
    for (double w : weights) sum += w;
    if (total < 0 || sum <= 0) throw Error("bad mixture request");
    MixtureConfig mix;
    std::array<double, kTaskCount> exact{};
    int assigned = 0;
    for (int t = 0; t < kTaskCount; ++t) {
        exact[t] = total * weights[t] / sum;
        mix.counts[t] = static_cast<int>(exact[t]);
        assigned += mix.counts[t];
    }
    // hand out the remainder by largest fractional part, ties to lower index
    std::array<int, kTaskCount> order = {0, 1, 2, 3, 4};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return exact[a] - static_cast<int>(exact[a]) > exact[b] - static_cast<int>(exact[b]);
    });
    for (int k = 0; k < total - assigned; ++k) ++mix.counts[order[k % kTaskCount]];
    return mix;
}

namespace {

struct Templates {
    std::vector<const char*> en, cn;
};

const Templates& templates_for(const std::string& family) {
    static const std::map<std::string, Templates> table = {
        {"full",
         {{"Parse the mind map in the image into the structured token format.",
           "Convert the mind map shown in the image into its token sequence.",
           "Transcribe the complete structure of this mind map as a token sequence."},
          {"请将图中的思维导图解析为结构化的标记序列。",
           "将图像中的思维导图转换为完整的标记序列。",
           "请把这张思维导图的完整结构转写为标记序列。"}}},
        {"part",
         {{"Parse the subgraph of the mind map centered on the theme '{x}'.",
           "Return the parsing result for the branch rooted at '{x}'.",
           "Extract the subtree with the theme '{x}' in the structured token format."},
          {"请解析以主题“{x}”为中心的子图。", "返回以“{x}”为根的分支的解析结果。",
           "请以结构化标记格式提取主题为“{x}”的子树。"}}},
        {"position",
         {{"Parse the subgraph of the mind map centered on the node located at {bbox}.",
           "Return the parsing result for the branch rooted at the node at {bbox}.",
           "Extract the subtree rooted at the node within {bbox} in the structured token format."},
          {"请解析以位于{bbox}的节点为中心的子图。", "返回以{bbox}处节点为根的分支的解析结果。",
           "请以结构化标记格式提取以{bbox}处节点为根的子树。"}}},
        {"central_theme",
         {{"Describe the central theme of the mind map.",
           "What is the central theme of this mind map?"},
          {"请描述这张思维导图的中心主题。", "这张思维导图的中心主题是什么？"}}},
        {"parent_of",
         {{"Which node is the parent of '{x}'?", "What is the parent node of '{x}'?"},
          {"哪个节点是“{x}”的父节点？", "“{x}”的父节点是什么？"}}},
        {"children_of",
         {{"List the children of the node '{x}'.",
           "Which nodes are the direct children of '{x}'?"},
          {"请列出节点“{x}”的子节点。", "哪些节点是“{x}”的直接子节点？"}}},
        {"sibling_count",
         {{"How many siblings does the node '{x}' have?",
           "How many sibling nodes does '{x}' have?"},
          {"节点“{x}”有多少个兄弟节点？", "“{x}”的兄弟节点数量是多少？"}}},
        {"node_depth",
         {{"At what depth is the node '{x}'? The root is at depth 1.",
           "What is the depth of the node '{x}', counting the root as depth 1?"},
          {"节点“{x}”位于第几层？根节点为第1层。",
           "以根节点为第1层，节点“{x}”的深度是多少？"}}},
        {"total_count",
         {{"How many nodes does the mind map contain?",
           "What is the total number of nodes in this mind map?"},
          {"这张思维导图共包含多少个节点？", "这张思维导图的节点总数是多少？"}}},
        {"count_in_box",
         {{"How many nodes are contained within the bounding box {bbox}?",
           "Count the nodes that lie completely inside the bounding box {bbox}."},
          {"边界框{bbox}内包含多少个节点？", "请数出完全位于边界框{bbox}内的节点数量。"}}},
        {"text_at_box",
         {{"What is the text of the node located at {bbox}?",
           "Return the text of the node whose bounding box is {bbox}."},
          {"位于{bbox}的节点的文本是什么？", "请返回边界框为{bbox}的节点的文本。"}}},
        {"box_of_node",
         {{"Return the bounding box of the node with the text '{x}'.",
           "Where is the node '{x}'? Answer with its bounding box."},
          {"请返回文本为“{x}”的节点的边界框。", "节点“{x}”在哪里？请用边界框回答。"}}},
        {"box_of_subgraph",
         {{"Return the bounding box of the subgraph with the theme '{x}'.",
           "Give the bounding box covering the entire subgraph rooted at '{x}'."},
          {"请返回主题为“{x}”的子图的边界框。", "请给出以“{x}”为根的整个子图的边界框。"}}},
    };
    auto it = table.find(family);
    if (it == table.end()) throw Error("unknown template family: " + family);
    return it->second;
}

std::string replace_all(std::string text, std::string_view what, std::string_view with) {
    std::size_t pos = 0;
    while ((pos = text.find(what, pos)) != std::string::npos) {
        text.replace(pos, what.size(), with);
        pos += with.size();
    }
    return text;
}

struct PromptDraw {
    std::string text;
    std::string template_id;
};

PromptDraw draw_prompt(const std::string& family, Language lang, Rng& rng) {
    const Templates& set = templates_for(family);
    const auto& list = lang == Language::cn ? set.cn : set.en;
    std::size_t idx = rng.below(list.size());
    return {list[idx], std::string(kTemplateVersion) + ":" + to_string(lang) + ":" + family + ":" +
                           std::to_string(idx)};
}

struct NodeEntry {
    const MindNode* node;
    std::string path;
    int parent = -1; // index into the entries vector
    int depth = 1;
    bool unique_text = true;
};

std::vector<NodeEntry> index_nodes(const MindNode& root) {
    std::vector<NodeEntry> entries;
    std::map<std::string, int> text_count;
    struct Walker {
        std::vector<NodeEntry>& entries;
        std::map<std::string, int>& text_count;
        void walk(const MindNode& node, const std::string& path, int parent, int depth) {
            text_count[node.text]++;
            entries.push_back({&node, path, parent, depth, true});
            int self = static_cast<int>(entries.size()) - 1;
            for (std::size_t i = 0; i < node.children.size(); ++i)
                walk(node.children[i], path + "_" + std::to_string(i + 1), self, depth + 1);
        }
    } walker{entries, text_count};
    walker.walk(root, "1", -1, 1);
    for (auto& e : entries) e.unique_text = text_count[e.node->text] == 1;
    return entries;
}

void fill_meta(TaskInstance& inst, const MindMap& map) {
    inst.language = map.language;
    inst.source = map.source;
    inst.node_count = tree_size(map.root);
    inst.depth = tree_depth(map.root);
}

void require_geometry(const MindMap& map) {
    if (!has_full_geometry(map.root))
        throw MissingGeometry("map " + map.id + " carries no per-node boxes");
    if (map.image_width < 1 || map.image_height < 1)
        throw MissingGeometry("map " + map.id + " has no image dimensions");
}

/// Part-parse candidate: unique-text non-root, preferring nodes with children.
int pick_theme_node(const std::vector<NodeEntry>& entries, Rng& rng) {
    std::vector<int> with_children, any;
    for (int i = 1; i < static_cast<int>(entries.size()); ++i) {
        if (!entries[i].unique_text) continue;
        any.push_back(i);
        if (!entries[i].node->children.empty()) with_children.push_back(i);
    }
    const auto& pool = with_children.empty() ? any : with_children;
    if (pool.empty()) throw NoEligibleNode("no unique-text non-root node");
    return pool[rng.below(pool.size())];
}

PixelBox subtree_union_box(const MindNode& node) {
    PixelBox box = *node.box;
    for (const auto& child : node.children) {
        PixelBox cb = subtree_union_box(child);
        box.x1 = std::min(box.x1, cb.x1);
        box.y1 = std::min(box.y1, cb.y1);
        box.x2 = std::max(box.x2, cb.x2);
        box.y2 = std::max(box.y2, cb.y2);
    }
    return box;
}

} // namespace

TaskInstance gen_full_parse(const MindMap& map, Rng& rng) {
    TaskInstance inst;
    inst.task = Task::full_parse;
    inst.question_family = "full";
    fill_meta(inst, map);
    auto prompt = draw_prompt("full", map.language, rng);
    inst.prompt = prompt.text;
    inst.template_id = prompt.template_id;
    inst.answer = serialize_tokens(map.root);
    return inst;
}

TaskInstance gen_part_parse(const MindMap& map, Rng& rng) {
    auto entries = index_nodes(map.root);
    if (entries.size() < 2) throw NoEligibleNode("single-node map");
    int chosen = pick_theme_node(entries, rng);

    TaskInstance inst;
    inst.task = Task::part_parse;
    inst.question_family = "part";
    fill_meta(inst, map);
    auto prompt = draw_prompt("part", map.language, rng);
    inst.prompt = replace_all(prompt.text, "{x}", entries[chosen].node->text);
    inst.template_id = prompt.template_id;
    inst.answer = serialize_tokens(*entries[chosen].node);
    return inst;
}

TaskInstance gen_position_parse(const MindMap& map, Rng& rng) {
    require_geometry(map);
    auto entries = index_nodes(map.root);
    if (entries.size() < 2) throw NoEligibleNode("single-node map");
    int chosen = pick_theme_node(entries, rng);

    TaskInstance inst;
    inst.task = Task::position_parse;
    inst.question_family = "position";
    fill_meta(inst, map);
    NormBox box = normalize_box(*entries[chosen].node->box, map.image_width, map.image_height);
    auto prompt = draw_prompt("position", map.language, rng);
    inst.prompt = replace_all(prompt.text, "{bbox}", bbox_literal(box));
    inst.template_id = prompt.template_id;
    inst.answer = serialize_tokens(*entries[chosen].node);
    return inst;
}

TaskInstance gen_structured_vqa(const MindMap& map, Rng& rng) {
    auto entries = index_nodes(map.root);

    std::vector<int> unique_nonroot, unique_any, unique_with_children;
    for (int i = 0; i < static_cast<int>(entries.size()); ++i) {
        if (!entries[i].unique_text) continue;
        unique_any.push_back(i);
        if (i > 0) unique_nonroot.push_back(i);
        if (!entries[i].node->children.empty()) unique_with_children.push_back(i);
    }

    std::vector<std::string> families = {"central_theme", "total_count"};
    if (!unique_nonroot.empty()) {
        families.push_back("parent_of");
        families.push_back("sibling_count");
    }
    if (!unique_with_children.empty()) families.push_back("children_of");
    if (!unique_any.empty()) families.push_back("node_depth");
    std::sort(families.begin(), families.end());
    const std::string family = families[rng.below(families.size())];

    TaskInstance inst;
    inst.task = Task::structured_vqa;
    inst.question_family = family;
    fill_meta(inst, map);

    std::string x;
    if (family == "central_theme") {
        inst.answer = map.root.text;
    } else if (family == "total_count") {
        inst.answer = std::to_string(inst.node_count);
    } else if (family == "parent_of") {
        int i = unique_nonroot[rng.below(unique_nonroot.size())];
        x = entries[i].node->text;
        inst.answer = entries[entries[i].parent].node->text;
    } else if (family == "sibling_count") {
        int i = unique_nonroot[rng.below(unique_nonroot.size())];
        x = entries[i].node->text;
        inst.answer =
            std::to_string(entries[entries[i].parent].node->children.size() - 1);
    } else if (family == "children_of") {
        int i = unique_with_children[rng.below(unique_with_children.size())];
        x = entries[i].node->text;
        std::string joined;
        for (const auto& child : entries[i].node->children) {
            if (!joined.empty()) joined += ", ";
            joined += child.text;
        }
        inst.answer = joined;
    } else { // node_depth
        int i = unique_any[rng.below(unique_any.size())];
        x = entries[i].node->text;
        inst.answer = std::to_string(entries[i].depth);
    }

    auto prompt = draw_prompt(family, map.language, rng);
    inst.prompt = replace_all(prompt.text, "{x}", x);
    inst.template_id = prompt.template_id;
    return inst;
}

TaskInstance gen_position_vqa(const MindMap& map, Rng& rng) {
    require_geometry(map);
    auto entries = index_nodes(map.root);

    std::vector<int> unique_any;
    for (int i = 0; i < static_cast<int>(entries.size()); ++i)
        if (entries[i].unique_text) unique_any.push_back(i);

    std::vector<std::string> families = {"count_in_box", "text_at_box"};
    if (!unique_any.empty()) {
        families.push_back("box_of_node");
        families.push_back("box_of_subgraph");
    }
    std::sort(families.begin(), families.end());
    const std::string family = families[rng.below(families.size())];

    TaskInstance inst;
    inst.task = Task::position_vqa;
    inst.question_family = family;
    fill_meta(inst, map);

    const double w = map.image_width, h = map.image_height;
    std::string bbox_text, x;

    if (family == "count_in_box") {
        // Grow a random node's box outward so the query contains >= 1 node.
        const NodeEntry& anchor = entries[rng.below(entries.size())];
        PixelBox query = *anchor.node->box;
        query.x1 = std::max(0.0, query.x1 - rng.real(0, 0.3) * w);
        query.y1 = std::max(0.0, query.y1 - rng.real(0, 0.3) * h);
        query.x2 = std::min(w, query.x2 + rng.real(0, 0.3) * w);
        query.y2 = std::min(h, query.y2 + rng.real(0, 0.3) * h);
        int count = 0;
        for (const auto& e : entries)
            if (query.contains(*e.node->box)) ++count;
        inst.answer = std::to_string(count);
        inst.query_box_px = query;
        bbox_text = bbox_literal(normalize_box(query, map.image_width, map.image_height));
    } else if (family == "text_at_box") {
        const NodeEntry& target = entries[rng.below(entries.size())];
        inst.answer = target.node->text;
        inst.query_box_px = *target.node->box;
        bbox_text =
            bbox_literal(normalize_box(*target.node->box, map.image_width, map.image_height));
    } else if (family == "box_of_node") {
        const NodeEntry& target = entries[unique_any[rng.below(unique_any.size())]];
        x = target.node->text;
        inst.answer =
            bbox_literal(normalize_box(*target.node->box, map.image_width, map.image_height));
    } else { // box_of_subgraph
        const NodeEntry& target = entries[unique_any[rng.below(unique_any.size())]];
        x = target.node->text;
        PixelBox span = subtree_union_box(*target.node);
        inst.answer = bbox_literal(normalize_box(span, map.image_width, map.image_height));
    }

    auto prompt = draw_prompt(family, map.language, rng);
    inst.prompt = replace_all(prompt.text, "{bbox}", bbox_text);
    inst.prompt = replace_all(inst.prompt, "{x}", x);
    inst.template_id = prompt.template_id;
    return inst;
}

TaskInstance make_instance(const MindMap& map, Task task, Rng& rng) {
    switch (task) {
        case Task::full_parse: return gen_full_parse(map, rng);
        case Task::part_parse: return gen_part_parse(map, rng);
        case Task::position_parse: return gen_position_parse(map, rng);
        case Task::structured_vqa: return gen_structured_vqa(map, rng);
        case Task::position_vqa: return gen_position_vqa(map, rng);
    }
    throw Error("bad task enum");
}

namespace {

bool map_eligible(const MindMap& map, Task task) {
    switch (task) {
        case Task::full_parse:
        case Task::structured_vqa:
            return true;
        case Task::part_parse:
        case Task::position_parse: {
            auto entries = index_nodes(map.root);
            bool has_candidate = false;
            for (std::size_t i = 1; i < entries.size(); ++i)
                if (entries[i].unique_text) has_candidate = true;
            if (!has_candidate) return false;
            return task == Task::part_parse ||
                   (has_full_geometry(map.root) && map.image_width >= 1 && map.image_height >= 1);
        }
        case Task::position_vqa:
            return has_full_geometry(map.root) && map.image_width >= 1 && map.image_height >= 1;
    }
    return false;
}

} // namespace

std::vector<TaskInstance> build_dataset(const std::vector<MapRecord>& maps,
                                        const MixtureConfig& mixture, std::uint64_t seed) {
    const std::array<Task, kTaskCount> all_tasks = {Task::full_parse, Task::part_parse,
                                                    Task::position_parse, Task::structured_vqa,
                                                    Task::position_vqa};

    std::vector<std::pair<Task, const char*>> labels;
    for (int t = 0; t < kTaskCount; ++t)
        for (int k = 0; k < mixture.counts[t]; ++k) labels.emplace_back(all_tasks[t], "train");
    for (int t = 0; t < kTaskCount; ++t)
        for (int k = 0; k < mixture.test_counts[t]; ++k) labels.emplace_back(all_tasks[t], "test");
    Rng label_rng(derive_seed(seed, 0x6d69786cULL));
    label_rng.shuffle(labels);

    std::array<std::vector<int>, kTaskCount> eligible;
    for (int t = 0; t < kTaskCount; ++t) {
        if (mixture.counts[t] + mixture.test_counts[t] == 0) continue;
        for (int m = 0; m < static_cast<int>(maps.size()); ++m)
            if (map_eligible(maps[m].map, all_tasks[t])) eligible[t].push_back(m);
        if (eligible[t].empty())
            throw InsufficientMaps("no eligible map for task " + task_name(all_tasks[t]));
    }

    std::vector<TaskInstance> instances(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        Rng rng(derive_seed(seed, i + 1));
        const auto t = static_cast<int>(labels[i].first);
        const auto& pool = eligible[t];
        const MapRecord& record = maps[pool[rng.below(pool.size())]];
        TaskInstance inst = make_instance(record.map, labels[i].first, rng);
        char id[24];
        std::snprintf(id, sizeof id, "t%08zu", i);
        inst.id = id;
        inst.image_path = record.image_path;
        inst.split = labels[i].second;
        instances[i] = std::move(inst);
    }
    return instances;
}

} // namespace mindkit
