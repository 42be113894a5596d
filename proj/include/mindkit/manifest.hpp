#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "mindkit/tasks.hpp"

namespace mindkit {

// JSON Lines dataset files: manifest.jsonl (one TaskInstance per line) and
// maps.jsonl (one ground-truth map per line, geometry kept out of the
// canonical tree schema under a separate "boxes" key).

nlohmann::ordered_json instance_to_json(const TaskInstance& inst);
TaskInstance instance_from_json(const nlohmann::json& j);

nlohmann::ordered_json map_record_to_json(const MapRecord& record);
MapRecord map_record_from_json(const nlohmann::json& j);

void write_manifest(const std::vector<TaskInstance>& instances,
                    const std::filesystem::path& path);
std::vector<TaskInstance> read_manifest(const std::filesystem::path& path);

void write_map_records(const std::vector<MapRecord>& records,
                       const std::filesystem::path& path);
std::vector<MapRecord> read_map_records(const std::filesystem::path& path);

} // namespace mindkit
