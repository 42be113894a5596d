#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mindkit/tree.hpp"

namespace mindkit {

// Tolerant tag-soup HTML: enough of the language for mind-map exports.
// Mis-nested close tags pop to the nearest matching open tag; unknown close
// tags are dropped; script/style bodies are skipped.

struct HtmlNode {
    enum class Kind { element, text };
    Kind kind = Kind::element;
    std::string tag;  // lowercase, elements only
    std::string text; // text nodes only, entities decoded
    std::map<std::string, std::string> attrs;
    std::vector<HtmlNode> children;
};

HtmlNode parse_html(std::string_view html); // returns a synthetic root element

/// Selector grammar: `tag`, `.class`, `tag.class`, `tag[attr=value]`,
/// `[attr]`; comma-separated alternatives.
struct Selector {
    struct Rule {
        std::string tag;        // empty: any
        std::string class_name; // empty: any
        std::string attr_name, attr_value;
        bool attr_present_only = false;
    };
    std::vector<Rule> alternatives;
};

Selector parse_selector(std::string_view text);
bool selector_matches(const HtmlNode& element, const Selector& selector);

struct IngestConfig {
    std::string topic_selector;    // element holding one topic
    std::string text_selector;     // element holding the topic's visible text
    std::string children_selector; // container of the topic's child topics
    Language language = Language::en;
    bool strict = false; // strict: topic without text element is an error
};

/// Shipped profiles are JSON files: {"topic": ..., "text": ..., "children":
/// ..., "language": "en"|"cn", "strict": bool}.
IngestConfig load_ingest_profile(const std::filesystem::path& path);

/// Walks the export's element tree into the canonical schema. Styling and
/// positional markup is dropped; boxes stay absent. Throws NoRootTopic when
/// no element matches the topic selector, StructureError in strict mode for a
/// topic without a text element (lenient mode uses "").
MindMap parse_export_html(std::string_view html, const IngestConfig& config);

struct IngestEntry {
    MindMap map;
    std::filesystem::path html_path;
    std::filesystem::path image_path;
};

struct IngestReport {
    std::vector<IngestEntry> entries;
    std::vector<std::string> warnings; // unpaired files
    std::vector<std::string> errors;   // per-file failures, non-fatal
};

/// Pairs *.html with *.png by basename; image dimensions come from the PNG
/// header. Unpaired or unreadable files are reported, not fatal.
IngestReport ingest_directory(const std::filesystem::path& dir, const IngestConfig& config);

} // namespace mindkit
