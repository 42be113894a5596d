#include "mindkit/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mindkit/errors.hpp"
#include "mindkit/image.hpp"
#include "mindkit/utf8.hpp"

namespace mindkit {

namespace {

const std::set<std::string> kVoidElements = {"area",  "base", "br",    "col",   "embed",
                                             "hr",    "img",  "input", "link",  "meta",
                                             "param", "source", "track", "wbr"};

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] != '&') {
            out.push_back(text[i++]);
            continue;
        }
        std::size_t semi = text.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back(text[i++]);
            continue;
        }
        std::string_view name = text.substr(i + 1, semi - i - 1);
        if (name == "amp") out.push_back('&');
        else if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "quot") out.push_back('"');
        else if (name == "apos") out.push_back('\'');
        else if (name == "nbsp") out += " ";
        else if (!name.empty() && name[0] == '#') {
            char32_t cp = 0;
            bool ok = name.size() > 1;
            if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
                for (std::size_t k = 2; k < name.size() && ok; ++k) {
                    char c = name[k];
                    int digit = c >= '0' && c <= '9'   ? c - '0'
                                : c >= 'a' && c <= 'f' ? c - 'a' + 10
                                : c >= 'A' && c <= 'F' ? c - 'A' + 10
                                                       : -1;
                    if (digit < 0) ok = false;
                    else cp = cp * 16 + static_cast<char32_t>(digit);
                }
            } else {
                for (std::size_t k = 1; k < name.size() && ok; ++k) {
                    if (!std::isdigit(static_cast<unsigned char>(name[k]))) ok = false;
                    else cp = cp * 10 + static_cast<char32_t>(name[k] - '0');
                }
            }
            if (ok && cp > 0 && cp <= 0x10ffff) utf8_append(out, cp);
            else { out.push_back('&'); ++i; continue; }
        } else {
            out.push_back('&');
            ++i;
            continue;
        }
        i = semi + 1;
    }
    return out;
}

struct HtmlTokenizer {
    std::string_view input;
    std::size_t pos = 0;

    bool eof() const { return pos >= input.size(); }

    std::map<std::string, std::string> parse_attrs(std::string_view body) {
        std::map<std::string, std::string> attrs;
        std::size_t i = 0;
        while (i < body.size()) {
            while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
            if (i >= body.size() || body[i] == '/') break;
            std::string name;
            while (i < body.size() && body[i] != '=' && body[i] != '/' &&
                   !std::isspace(static_cast<unsigned char>(body[i])))
                name.push_back(body[i++]);
            while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
            std::string value;
            if (i < body.size() && body[i] == '=') {
                ++i;
                while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
                if (i < body.size() && (body[i] == '"' || body[i] == '\'')) {
                    char quote = body[i++];
                    while (i < body.size() && body[i] != quote) value.push_back(body[i++]);
                    if (i < body.size()) ++i;
                } else {
                    while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i])) &&
                           body[i] != '/')
                        value.push_back(body[i++]);
                }
            }
            if (!name.empty()) attrs[to_lower(name)] = decode_entities(value);
        }
        return attrs;
    }
};

/// Raw-text elements whose content must not be tokenized as markup.
bool is_rawtext(const std::string& tag) { return tag == "script" || tag == "style"; }

} // namespace

HtmlNode parse_html(std::string_view html) {
    HtmlNode root;
    root.tag = "#document";
    std::vector<HtmlNode*> stack = {&root};
    std::vector<std::string> open_tags = {"#document"};

    HtmlTokenizer tok{html};
    auto append_text = [&](std::string_view raw) {
        std::string decoded = decode_entities(raw);
        bool only_space = true;
        for (char c : decoded)
            if (!std::isspace(static_cast<unsigned char>(c))) only_space = false;
        if (only_space) return;
        HtmlNode node;
        node.kind = HtmlNode::Kind::text;
        node.text = std::move(decoded);
        stack.back()->children.push_back(std::move(node));
    };

    while (!tok.eof()) {
        std::size_t lt = html.find('<', tok.pos);
        if (lt == std::string_view::npos) {
            append_text(html.substr(tok.pos));
            break;
        }
        if (lt > tok.pos) append_text(html.substr(tok.pos, lt - tok.pos));
        tok.pos = lt;

        if (html.substr(tok.pos, 4) == "<!--") {
            std::size_t end = html.find("-->", tok.pos + 4);
            tok.pos = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        if (html.substr(tok.pos, 2) == "<!" || html.substr(tok.pos, 2) == "<?") {
            std::size_t end = html.find('>', tok.pos);
            tok.pos = end == std::string_view::npos ? html.size() : end + 1;
            continue;
        }
        std::size_t gt = html.find('>', tok.pos);
        if (gt == std::string_view::npos) {
            append_text(html.substr(tok.pos));
            break;
        }
        std::string_view tag_body = html.substr(tok.pos + 1, gt - tok.pos - 1);
        tok.pos = gt + 1;
        if (tag_body.empty()) continue;

        if (tag_body[0] == '/') {
            std::string name = to_lower(std::string(tag_body.substr(1)));
            name.erase(std::remove_if(name.begin(), name.end(),
                                      [](unsigned char c) { return std::isspace(c); }),
                       name.end());
            // pop to the matching open tag; ignore when none is open
            for (std::size_t depth = stack.size(); depth > 1; --depth) {
                if (open_tags[depth - 1] == name) {
                    stack.resize(depth - 1);
                    open_tags.resize(depth - 1);
                    break;
                }
            }
            continue;
        }

        bool self_closing = !tag_body.empty() && tag_body.back() == '/';
        std::size_t name_end = 0;
        while (name_end < tag_body.size() &&
               !std::isspace(static_cast<unsigned char>(tag_body[name_end])) &&
               tag_body[name_end] != '/')
            ++name_end;
        std::string name = to_lower(std::string(tag_body.substr(0, name_end)));
        if (name.empty()) continue;

        HtmlNode element;
        element.tag = name;
        element.attrs = tok.parse_attrs(tag_body.substr(name_end));

        if (is_rawtext(name) && !self_closing) {
            std::string close = "</" + name;
            std::size_t end = html.find(close, tok.pos);
            std::size_t content_end = end == std::string_view::npos ? html.size() : end;
            tok.pos = end == std::string_view::npos
                          ? html.size()
                          : html.find('>', end) == std::string_view::npos
                                ? html.size()
                                : html.find('>', end) + 1;
            (void)content_end; // script/style content dropped
            stack.back()->children.push_back(std::move(element));
            continue;
        }

        stack.back()->children.push_back(std::move(element));
        if (!self_closing && !kVoidElements.count(name)) {
            stack.push_back(&stack.back()->children.back());
            open_tags.push_back(name);
        }
    }
    return root;
}

Selector parse_selector(std::string_view text) {
    Selector selector;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string_view part =
            text.substr(start, comma == std::string_view::npos ? text.size() - start
                                                               : comma - start);
        while (!part.empty() && std::isspace(static_cast<unsigned char>(part.front())))
            part.remove_prefix(1);
        while (!part.empty() && std::isspace(static_cast<unsigned char>(part.back())))
            part.remove_suffix(1);
        if (!part.empty()) {
            Selector::Rule rule;
            std::size_t bracket = part.find('[');
            std::string_view head = part.substr(0, bracket);
            if (bracket != std::string_view::npos) {
                std::size_t close = part.find(']', bracket);
                if (close == std::string_view::npos)
                    throw SchemaError("unterminated attribute selector: " + std::string(part));
                std::string_view attr = part.substr(bracket + 1, close - bracket - 1);
                std::size_t eq = attr.find('=');
                if (eq == std::string_view::npos) {
                    rule.attr_name = to_lower(std::string(attr));
                    rule.attr_present_only = true;
                } else {
                    rule.attr_name = to_lower(std::string(attr.substr(0, eq)));
                    rule.attr_value = std::string(attr.substr(eq + 1));
                }
            }
            std::size_t dot = head.find('.');
            if (dot == std::string_view::npos) {
                rule.tag = to_lower(std::string(head));
            } else {
                rule.tag = to_lower(std::string(head.substr(0, dot)));
                rule.class_name = std::string(head.substr(dot + 1));
            }
            selector.alternatives.push_back(std::move(rule));
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (selector.alternatives.empty()) throw SchemaError("empty selector");
    return selector;
}

namespace {

bool has_class_token(const std::string& attr_value, const std::string& token) {
    std::istringstream in(attr_value);
    std::string word;
    while (in >> word)
        if (word == token) return true;
    return false;
}

bool rule_matches(const HtmlNode& node, const Selector::Rule& rule) {
    if (node.kind != HtmlNode::Kind::element) return false;
    if (!rule.tag.empty() && node.tag != rule.tag) return false;
    if (!rule.class_name.empty()) {
        auto it = node.attrs.find("class");
        if (it == node.attrs.end() || !has_class_token(it->second, rule.class_name)) return false;
    }
    if (!rule.attr_name.empty()) {
        auto it = node.attrs.find(rule.attr_name);
        if (it == node.attrs.end()) return false;
        if (!rule.attr_present_only && it->second != rule.attr_value) return false;
    }
    return true;
}

} // namespace

bool selector_matches(const HtmlNode& element, const Selector& selector) {
    for (const auto& rule : selector.alternatives)
        if (rule_matches(element, rule)) return true;
    return false;
}

IngestConfig load_ingest_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ingest profile: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw SchemaError("invalid JSON in profile: " + path.string());
    IngestConfig config;
    try {
        config.topic_selector = j.at("topic").get<std::string>();
        config.text_selector = j.at("text").get<std::string>();
        config.children_selector = j.at("children").get<std::string>();
        if (j.contains("language"))
            config.language = language_from_string(j.at("language").get<std::string>());
        config.strict = j.value("strict", false);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("bad ingest profile " + path.string() + ": " + e.what());
    }
    return config;
}

namespace {

std::string collapse_whitespace(const std::string& text) {
    std::string out;
    bool pending_space = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t before = pos;
        char32_t cp = utf8_next(text, pos);
        if (is_space_cp(cp)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.append(text, before, pos - before);
        }
    }
    return out;
}

void gather_text(const HtmlNode& node, std::string& out) {
    if (node.kind == HtmlNode::Kind::text) {
        out += node.text;
        out += ' ';
        return;
    }
    for (const auto& child : node.children) gather_text(child, out);
}

struct TopicParser {
    const Selector topic;
    const Selector text;
    const Selector children;
    bool strict;

    /// First descendant matching `sel`, not descending into nested topics.
    const HtmlNode* find_scoped(const HtmlNode& element, const Selector& sel) const {
        for (const auto& child : element.children) {
            if (child.kind != HtmlNode::Kind::element) continue;
            if (selector_matches(child, topic)) continue; // nested topic boundary
            if (selector_matches(child, sel)) return &child;
            if (const HtmlNode* found = find_scoped(child, sel)) return found;
        }
        return nullptr;
    }

    void collect_scoped_topics(const HtmlNode& element, std::vector<const HtmlNode*>& out) const {
        for (const auto& child : element.children) {
            if (child.kind != HtmlNode::Kind::element) continue;
            if (selector_matches(child, topic)) {
                out.push_back(&child);
                continue; // topics inside this one belong to it
            }
            collect_scoped_topics(child, out);
        }
    }

    MindNode parse_topic(const HtmlNode& element) const {
        MindNode node;
        const HtmlNode* text_el = find_scoped(element, text);
        if (!text_el) {
            if (strict) throw StructureError("topic without a text element");
            node.text = "";
        } else {
            std::string raw;
            gather_text(*text_el, raw);
            node.text = collapse_whitespace(raw);
        }
        // children containers in document order, then their scoped topics
        std::vector<const HtmlNode*> child_topics;
        collect_children(element, child_topics);
        for (const HtmlNode* child : child_topics) node.children.push_back(parse_topic(*child));
        return node;
    }

    void collect_children(const HtmlNode& element, std::vector<const HtmlNode*>& out) const {
        for (const auto& child : element.children) {
            if (child.kind != HtmlNode::Kind::element) continue;
            if (selector_matches(child, topic)) continue;
            if (selector_matches(child, children)) {
                collect_scoped_topics(child, out);
            } else {
                collect_children(child, out);
            }
        }
    }
};

const HtmlNode* find_first(const HtmlNode& node, const Selector& sel) {
    if (node.kind == HtmlNode::Kind::element && selector_matches(node, sel)) return &node;
    for (const auto& child : node.children)
        if (const HtmlNode* found = find_first(child, sel)) return found;
    return nullptr;
}

} // namespace

MindMap parse_export_html(std::string_view html, const IngestConfig& config) {
    HtmlNode document = parse_html(html);
    TopicParser parser{parse_selector(config.topic_selector),
                       parse_selector(config.text_selector),
                       parse_selector(config.children_selector), config.strict};
    const HtmlNode* root_topic = find_first(document, parser.topic);
    if (!root_topic) throw NoRootTopic("no element matches the topic selector");

    MindMap map;
    map.root = parser.parse_topic(*root_topic);
    map.language = config.language;
    map.source = MapSource::ingested;
    return map;
}

IngestReport ingest_directory(const std::filesystem::path& dir, const IngestConfig& config) {
    IngestReport report;
    if (!std::filesystem::is_directory(dir)) {
        report.errors.push_back("not a directory: " + dir.string());
        return report;
    }
    std::vector<std::filesystem::path> html_files;
    std::set<std::string> png_stems;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = to_lower(entry.path().extension().string());
        if (ext == ".html" || ext == ".htm") html_files.push_back(entry.path());
        else if (ext == ".png") png_stems.insert(entry.path().stem().string());
    }
    std::sort(html_files.begin(), html_files.end());

    std::set<std::string> used_pngs;
    for (const auto& html_path : html_files) {
        const std::string stem = html_path.stem().string();
        if (!png_stems.count(stem)) {
            report.warnings.push_back("no paired PNG for " + html_path.filename().string());
            continue;
        }
        used_pngs.insert(stem);
        const auto png_path = html_path.parent_path() / (stem + ".png");
        try {
            std::ifstream in(html_path, std::ios::binary);
            if (!in) throw IoError("cannot read " + html_path.string());
            std::stringstream buffer;
            buffer << in.rdbuf();
            IngestEntry entry;
            entry.map = parse_export_html(buffer.str(), config);
            auto [w, h] = read_png_dimensions(png_path);
            entry.map.image_width = w;
            entry.map.image_height = h;
            entry.map.id = stem;
            entry.html_path = html_path;
            entry.image_path = png_path;
            report.entries.push_back(std::move(entry));
        } catch (const Error& e) {
            report.errors.push_back(html_path.filename().string() + ": " + e.what());
        }
    }
    for (const auto& stem : png_stems)
        if (!used_pngs.count(stem))
            report.warnings.push_back("no paired HTML for " + stem + ".png");
    return report;
}

} // namespace mindkit
