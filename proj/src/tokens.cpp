#include "mindkit/tokens.hpp"

#include <cctype>
#include <vector>

#include "mindkit/errors.hpp"
#include "mindkit/utf8.hpp"

namespace mindkit {

std::string escape_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '&') {
            if (text.substr(i, 5) == "&amp;") { out.push_back('&'); i += 5; continue; }
            if (text.substr(i, 4) == "&lt;") { out.push_back('<'); i += 4; continue; }
            if (text.substr(i, 4) == "&gt;") { out.push_back('>'); i += 4; continue; }
        }
        out.push_back(text[i]);
        ++i;
    }
    return out;
}

namespace {

void serialize_node(const MindNode& node, const std::string& path, std::string& out) {
    out += "<s_n";
    out += path;
    out += "><s_text>";
    out += escape_text(node.text);
    out += "</s_text>";
    for (std::size_t i = 0; i < node.children.size(); ++i)
        serialize_node(node.children[i], path + "_" + std::to_string(i + 1), out);
    out += "</s_n";
    out += path;
    out += ">";
}

struct StrictParser {
    std::string_view input;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw MalformedSequence(why + " at offset " + std::to_string(pos));
    }

    bool consume(std::string_view literal) {
        if (input.substr(pos, literal.size()) != literal) return false;
        pos += literal.size();
        return true;
    }

    void expect(std::string_view literal, const char* what) {
        if (!consume(literal)) fail(std::string("expected ") + what);
    }

    // Escaped text runs until the next '<'; raw angle brackets must have been
    // escaped at serialization time.
    std::string read_text() {
        std::size_t start = pos;
        while (pos < input.size() && input[pos] != '<') {
            if (input[pos] == '>') fail("unescaped '>' in text");
            ++pos;
        }
        return unescape_text(input.substr(start, pos - start));
    }

    MindNode parse_element(const std::string& path) {
        expect("<s_n" + path + ">", "node open tag matching its position");
        expect("<s_text>", "<s_text>");
        MindNode node;
        node.text = read_text();
        expect("</s_text>", "</s_text>");
        const std::string close = "</s_n" + path + ">";
        while (!consume(close)) {
            if (pos >= input.size()) fail("unbalanced tags: missing " + close);
            node.children.push_back(parse_element(path + "_" + std::to_string(node.children.size() + 1)));
        }
        return node;
    }
};

} // namespace

std::string serialize_tokens(const MindNode& tree) {
    std::string out;
    serialize_node(tree, "1", out);
    return out;
}

MindNode parse_tokens(std::string_view seq) {
    StrictParser p{seq};
    MindNode root = p.parse_element("1");
    if (p.pos != seq.size()) p.fail("trailing content after root element");
    return root;
}

namespace {

bool is_path_tag_body(std::string_view body) {
    // s_n followed by digits separated by underscores, e.g. s_n1_2_10
    if (body.substr(0, 3) != "s_n") return false;
    std::string_view rest = body.substr(3);
    if (rest.empty()) return false;
    bool expect_digit = true;
    for (char c : rest) {
        if (c == '_') {
            if (expect_digit) return false;
            expect_digit = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            expect_digit = false;
        } else {
            return false;
        }
    }
    return !expect_digit;
}

} // namespace

std::optional<MindNode> parse_tokens_lenient(std::string_view seq) {
    struct Frame {
        std::string tag;
        MindNode node;
        bool has_text = false;
    };
    std::vector<Frame> stack;
    std::vector<MindNode> roots;

    std::size_t pos = 0;
    while (pos < seq.size()) {
        if (seq[pos] != '<') {
            // Stray prose between tags means this is not a clean tree.
            if (!std::isspace(static_cast<unsigned char>(seq[pos]))) return std::nullopt;
            ++pos;
            continue;
        }
        std::size_t end = seq.find('>', pos);
        if (end == std::string_view::npos) return std::nullopt;
        std::string_view body = seq.substr(pos + 1, end - pos - 1);
        pos = end + 1;

        if (body == "s_text") {
            if (stack.empty() || stack.back().has_text) return std::nullopt;
            std::size_t text_end = seq.find("</s_text>", pos);
            std::string raw;
            if (text_end == std::string_view::npos) {
                raw = std::string(seq.substr(pos)); // auto-close at end of string
                pos = seq.size();
            } else {
                raw = std::string(seq.substr(pos, text_end - pos));
                pos = text_end + 9;
            }
            if (raw.find('<') != std::string::npos) return std::nullopt;
            stack.back().node.text = unescape_text(raw);
            stack.back().has_text = true;
        } else if (!body.empty() && body[0] == '/') {
            std::string_view name = body.substr(1);
            if (name == "s_text") return std::nullopt; // close without open
            if (!is_path_tag_body(name)) return std::nullopt;
            if (stack.empty() || stack.back().tag != name) return std::nullopt;
            Frame done = std::move(stack.back());
            stack.pop_back();
            if (stack.empty()) roots.push_back(std::move(done.node));
            else stack.back().node.children.push_back(std::move(done.node));
        } else if (is_path_tag_body(body)) {
            stack.push_back(Frame{std::string(body), MindNode{}, false});
        } else {
            return std::nullopt; // unknown tag
        }
    }
    // Auto-close whatever is still open.
    while (!stack.empty()) {
        Frame done = std::move(stack.back());
        stack.pop_back();
        if (stack.empty()) roots.push_back(std::move(done.node));
        else stack.back().node.children.push_back(std::move(done.node));
    }
    if (roots.size() != 1) return std::nullopt;
    return roots.front();
}

int count_tokens(std::string_view seq, Language lang) {
    int count = 0;
    std::size_t pos = 0;
    bool in_word = false;
    while (pos < seq.size()) {
        if (seq[pos] == '<') {
            std::size_t end = seq.find('>', pos);
            in_word = false;
            if (end == std::string_view::npos) {
                // No closing bracket: count the remainder as text.
                seq = seq.substr(pos);
                pos = 0;
                break;
            }
            ++count;
            pos = end + 1;
            continue;
        }
        if (lang == Language::cn) {
            char32_t cp = utf8_next(seq, pos);
            if (!is_space_cp(cp)) ++count;
        } else {
            char32_t cp = utf8_next(seq, pos);
            if (is_space_cp(cp)) {
                in_word = false;
            } else if (!in_word) {
                ++count;
                in_word = true;
            }
        }
    }
    // Tail text after an unterminated '<'.
    while (pos < seq.size()) {
        char32_t cp = utf8_next(seq, pos);
        if (lang == Language::cn) {
            if (!is_space_cp(cp)) ++count;
        } else if (is_space_cp(cp)) {
            in_word = false;
        } else if (!in_word) {
            ++count;
            in_word = true;
        }
    }
    return count;
}

} // namespace mindkit
