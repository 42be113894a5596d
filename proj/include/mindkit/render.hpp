#pragma once

#include <map>
#include <string>
#include <vector>

#include "mindkit/image.hpp"
#include "mindkit/rng.hpp"
#include "mindkit/tree.hpp"

namespace mindkit {

struct RenderOptions {
    std::string graphviz_dir; // empty: resolve engines on PATH
    int dpi = 96;
    double timeout_sec = 60.0;
};

struct RenderResult {
    Image image;
    std::map<std::string, PixelBox> boxes; // DOT node id -> pixel box
    std::string engine;
};

/// Runs the layout engine twice on the same DOT: once for the PNG raster,
/// once for plain-format geometry. Plain coordinates are in inches with the
/// origin bottom-left; they are scaled by dpi and flipped to image space.
/// Throws EngineFailure / EngineTimeout.
RenderResult layout_and_render(const std::string& dot, const std::string& engine,
                               const RenderOptions& options);

/// Parses `-Tplain` output into pixel boxes. Exposed for tests.
/// drawing_width/height receive the raster extent in pixels.
std::map<std::string, PixelBox> parse_plain_geometry(const std::string& plain, int dpi,
                                                     double* drawing_width = nullptr,
                                                     double* drawing_height = nullptr);

struct CompositeConfig {
    int background_count_min = 0;
    int background_count_max = 3;
    double max_margin_frac = 0.3; // extra canvas per axis, as a fraction of the diagram
};

/// Pastes 0..k background images beneath the diagram on an enlarged canvas,
/// then the diagram itself at a random offset; every box is translated by
/// that offset.
RenderResult composite_background(RenderResult result, const std::vector<Image>& backgrounds,
                                  Rng& rng, const CompositeConfig& config);

/// Maps a coordinate c over dimension D to min(floor(c * 1000 / D), 999).
/// Throws OutOfBounds when the box does not lie within [0,w] x [0,h].
NormBox normalize_box(const PixelBox& box, int width, int height);

} // namespace mindkit
