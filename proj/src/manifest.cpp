#include "mindkit/manifest.hpp"

#include <fstream>

#include "mindkit/errors.hpp"
#include "mindkit/json_codec.hpp"

namespace mindkit {

nlohmann::ordered_json instance_to_json(const TaskInstance& inst) {
    nlohmann::ordered_json meta;
    meta["language"] = to_string(inst.language);
    meta["node_count"] = inst.node_count;
    meta["depth"] = inst.depth;
    meta["source"] = to_string(inst.source);
    meta["question_family"] = inst.question_family;
    meta["template_id"] = inst.template_id;
    meta["complexity"] = complexity_tag(inst.node_count);
    meta["split"] = inst.split;
    if (inst.query_box_px) {
        meta["query_box_px"] = {inst.query_box_px->x1, inst.query_box_px->y1,
                                inst.query_box_px->x2, inst.query_box_px->y2};
    }
    nlohmann::ordered_json j;
    j["id"] = inst.id;
    j["task"] = task_name(inst.task);
    j["image"] = inst.image_path;
    j["prompt"] = inst.prompt;
    j["answer"] = inst.answer;
    j["meta"] = std::move(meta);
    return j;
}

TaskInstance instance_from_json(const nlohmann::json& j) {
    try {
        TaskInstance inst;
        inst.id = j.at("id").get<std::string>();
        inst.task = task_from_name(j.at("task").get<std::string>());
        inst.image_path = j.at("image").get<std::string>();
        inst.prompt = j.at("prompt").get<std::string>();
        inst.answer = j.at("answer").get<std::string>();
        const auto& meta = j.at("meta");
        inst.language = language_from_string(meta.at("language").get<std::string>());
        inst.node_count = meta.at("node_count").get<int>();
        inst.depth = meta.at("depth").get<int>();
        inst.source = source_from_string(meta.at("source").get<std::string>());
        inst.question_family = meta.at("question_family").get<std::string>();
        inst.template_id = meta.at("template_id").get<std::string>();
        inst.split = meta.value("split", "train");
        if (meta.contains("query_box_px")) {
            const auto& q = meta.at("query_box_px");
            inst.query_box_px = PixelBox{q.at(0).get<double>(), q.at(1).get<double>(),
                                         q.at(2).get<double>(), q.at(3).get<double>()};
        }
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("bad manifest record: ") + e.what());
    }
}

nlohmann::ordered_json map_record_to_json(const MapRecord& record) {
    nlohmann::ordered_json j;
    j["id"] = record.map.id;
    j["language"] = to_string(record.map.language);
    j["source"] = to_string(record.map.source);
    j["width"] = record.map.image_width;
    j["height"] = record.map.image_height;
    j["image"] = record.image_path;
    j["engine"] = record.engine;
    j["tree"] = tree_to_json(record.map.root);
    if (has_full_geometry(record.map.root)) {
        nlohmann::ordered_json boxes = nlohmann::ordered_json::object();
        visit_with_path(record.map.root, [&](const MindNode& node, const std::string& path) {
            boxes[path] = {node.box->x1, node.box->y1, node.box->x2, node.box->y2};
        });
        j["boxes"] = std::move(boxes);
    } else {
        j["boxes"] = nullptr;
    }
    return j;
}

MapRecord map_record_from_json(const nlohmann::json& j) {
    try {
        MapRecord record;
        record.map.id = j.at("id").get<std::string>();
        record.map.language = language_from_string(j.at("language").get<std::string>());
        record.map.source = source_from_string(j.at("source").get<std::string>());
        record.map.image_width = j.at("width").get<int>();
        record.map.image_height = j.at("height").get<int>();
        record.image_path = j.at("image").get<std::string>();
        record.engine = j.value("engine", "");
        record.map.root = tree_from_json(j.at("tree"));
        if (j.contains("boxes") && !j.at("boxes").is_null()) {
            const auto& boxes = j.at("boxes");
            visit_with_path(record.map.root, [&](MindNode& node, const std::string& path) {
                const auto& b = boxes.at(path);
                node.box = PixelBox{b.at(0).get<double>(), b.at(1).get<double>(),
                                    b.at(2).get<double>(), b.at(3).get<double>()};
            });
        }
        return record;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("bad map record: ") + e.what());
    }
}

namespace {

template <class T, class ToJson>
void write_jsonl(const std::vector<T>& items, const std::filesystem::path& path, ToJson to_json) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& item : items) out << to_json(item).dump() << "\n";
    if (!out) throw IoError("short write: " + path.string());
}

template <class T, class FromJson>
std::vector<T> read_jsonl(const std::filesystem::path& path, FromJson from_json) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<T> items;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
        items.push_back(from_json(j));
    }
    return items;
}

} // namespace

void write_manifest(const std::vector<TaskInstance>& instances,
                    const std::filesystem::path& path) {
    write_jsonl(instances, path, instance_to_json);
}

std::vector<TaskInstance> read_manifest(const std::filesystem::path& path) {
    return read_jsonl<TaskInstance>(path, instance_from_json);
}

void write_map_records(const std::vector<MapRecord>& records,
                       const std::filesystem::path& path) {
    write_jsonl(records, path, map_record_to_json);
}

std::vector<MapRecord> read_map_records(const std::filesystem::path& path) {
    return read_jsonl<MapRecord>(path, map_record_from_json);
}

} // namespace mindkit
