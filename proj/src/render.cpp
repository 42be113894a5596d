#include "mindkit/render.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mindkit/errors.hpp"
#include "mindkit/process.hpp"

namespace mindkit {

namespace {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<std::uint64_t> counter{0};
        auto base = std::filesystem::temp_directory_path();
        path = base / ("mindkit-" + std::to_string(::getpid()) + "-" +
                       std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

// Tokenizer for plain-format lines; fields may be double-quoted.
std::vector<std::string> split_plain_line(const std::string& line) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        std::string token;
        if (line[i] == '"') {
            ++i;
            while (i < line.size() && line[i] != '"') {
                if (line[i] == '\\' && i + 1 < line.size()) ++i;
                token.push_back(line[i++]);
            }
            if (i < line.size()) ++i;
        } else {
            while (i < line.size() && line[i] != ' ' && line[i] != '\t') token.push_back(line[i++]);
        }
        tokens.push_back(std::move(token));
    }
    return tokens;
}

double parse_double(const std::string& s) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw EngineFailure("bad number in plain output: " + s);
    }
}

} // namespace

std::map<std::string, PixelBox> parse_plain_geometry(const std::string& plain, int dpi,
                                                     double* drawing_width,
                                                     double* drawing_height) {
    std::map<std::string, PixelBox> boxes;
    std::istringstream in(plain);
    std::string line;
    double scale = 1.0, graph_w = 0.0, graph_h = 0.0;
    bool saw_graph = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tokens = split_plain_line(line);
        if (tokens.empty()) continue;
        if (tokens[0] == "graph") {
            if (tokens.size() < 4) throw EngineFailure("malformed graph line: " + line);
            scale = parse_double(tokens[1]);
            graph_w = parse_double(tokens[2]);
            graph_h = parse_double(tokens[3]);
            saw_graph = true;
        } else if (tokens[0] == "node") {
            if (!saw_graph) throw EngineFailure("node line before graph line");
            if (tokens.size() < 6) throw EngineFailure("malformed node line: " + line);
            const std::string& name = tokens[1];
            const double to_px = scale * dpi;
            double cx = parse_double(tokens[2]) * to_px;
            // plain origin is bottom-left; image origin is top-left
            double cy = (graph_h - parse_double(tokens[3])) * to_px;
            double half_w = parse_double(tokens[4]) * to_px / 2.0;
            double half_h = parse_double(tokens[5]) * to_px / 2.0;
            if (boxes.count(name)) throw EngineFailure("duplicate node in plain output: " + name);
            boxes[name] = PixelBox{cx - half_w, cy - half_h, cx + half_w, cy + half_h};
        } else if (tokens[0] == "edge" || tokens[0] == "stop") {
            // geometry of edges is not used
        } else {
            throw EngineFailure("unrecognized plain statement: " + tokens[0]);
        }
    }
    if (!saw_graph) throw EngineFailure("plain output missing graph line");
    if (drawing_width) *drawing_width = graph_w * scale * dpi;
    if (drawing_height) *drawing_height = graph_h * scale * dpi;
    return boxes;
}

RenderResult layout_and_render(const std::string& dot, const std::string& engine,
                               const RenderOptions& options) {
    TempDir tmp;
    const auto dot_path = tmp.path / "graph.dot";
    const auto png_path = tmp.path / "graph.png";
    {
        std::ofstream out(dot_path, std::ios::binary);
        out << dot;
        if (!out) throw IoError("cannot write " + dot_path.string());
    }

    const std::string exe =
        options.graphviz_dir.empty()
            ? engine
            : (std::filesystem::path(options.graphviz_dir) / engine).string();

    auto geometry = run_process({exe, "-Tplain", dot_path.string()}, options.timeout_sec);
    if (geometry.timed_out) throw EngineTimeout(engine + " timed out during layout");
    if (geometry.exit_code != 0)
        throw EngineFailure(engine + " layout failed (exit " +
                            std::to_string(geometry.exit_code) + "): " + geometry.err);

    auto raster = run_process({exe, "-Tpng", "-Gdpi=" + std::to_string(options.dpi), "-o",
                               png_path.string(), dot_path.string()},
                              options.timeout_sec);
    if (raster.timed_out) throw EngineTimeout(engine + " timed out during rasterization");
    if (raster.exit_code != 0)
        throw EngineFailure(engine + " rasterization failed (exit " +
                            std::to_string(raster.exit_code) + "): " + raster.err);

    RenderResult result;
    result.engine = engine;
    result.boxes = parse_plain_geometry(geometry.out, options.dpi);
    try {
        result.image = load_png(png_path);
    } catch (const IoError& e) {
        throw EngineFailure(engine + " produced no decodable PNG: " + e.what());
    }

    // Rounding at the raster edge can leave a box a fraction outside.
    for (auto& [id, box] : result.boxes) {
        box.x1 = std::clamp(box.x1, 0.0, static_cast<double>(result.image.width));
        box.x2 = std::clamp(box.x2, 0.0, static_cast<double>(result.image.width));
        box.y1 = std::clamp(box.y1, 0.0, static_cast<double>(result.image.height));
        box.y2 = std::clamp(box.y2, 0.0, static_cast<double>(result.image.height));
    }
    return result;
}

RenderResult composite_background(RenderResult result, const std::vector<Image>& backgrounds,
                                  Rng& rng, const CompositeConfig& config) {
    const int diagram_w = result.image.width;
    const int diagram_h = result.image.height;

    int k = 0;
    if (!backgrounds.empty() && config.background_count_max >= config.background_count_min)
        k = rng.range(config.background_count_min, config.background_count_max);

    const int max_mx = static_cast<int>(diagram_w * config.max_margin_frac);
    const int max_my = static_cast<int>(diagram_h * config.max_margin_frac);
    const int mx = max_mx > 0 ? rng.range(0, max_mx) : 0;
    const int my = max_my > 0 ? rng.range(0, max_my) : 0;
    const int dx = mx > 0 ? rng.range(0, mx) : 0;
    const int dy = my > 0 ? rng.range(0, my) : 0;

    Image canvas(diagram_w + mx, diagram_h + my, 255, 255, 255);
    for (int i = 0; i < k; ++i) {
        const Image& bg = backgrounds[rng.below(backgrounds.size())];
        int bx = rng.range(-bg.width / 2, canvas.width - bg.width / 2);
        int by = rng.range(-bg.height / 2, canvas.height - bg.height / 2);
        paste(canvas, bg, bx, by);
    }
    paste(canvas, result.image, dx, dy);

    result.image = std::move(canvas);
    for (auto& [id, box] : result.boxes) {
        box.x1 += dx;
        box.x2 += dx;
        box.y1 += dy;
        box.y2 += dy;
    }
    return result;
}

NormBox normalize_box(const PixelBox& box, int width, int height) {
    if (width < 1 || height < 1) throw OutOfBounds("image dimensions must be >= 1");
    if (box.x1 < 0 || box.y1 < 0 || box.x1 > box.x2 || box.y1 > box.y2 || box.x2 > width ||
        box.y2 > height)
        throw OutOfBounds("box not within image bounds");
    auto norm = [](double c, int d) {
        return std::min(static_cast<int>(std::floor(c * 1000.0 / d)), 999);
    };
    return NormBox{norm(box.x1, width), norm(box.y1, height), norm(box.x2, width),
                   norm(box.y2, height)};
}

} // namespace mindkit
