#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace mindkit {

/// 8-bit RGB raster, row-major, interleaved channels.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    std::uint8_t* at(int x, int y) { return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
};

bool operator==(const Image& a, const Image& b);

Image load_png(const std::filesystem::path& path);
void save_png(const Image& image, const std::filesystem::path& path);
Image decode_png(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_png(const Image& image);

/// Width/height from the IHDR header, without decoding the raster.
std::pair<int, int> read_png_dimensions(const std::filesystem::path& path);

// Kernels. Each has an OpenMP-parallel entry point and a serial reference;
// outputs are bit-identical because the noise is counter-based per pixel.

/// Additive per-channel Gaussian noise, clamped to [0, 255]. sigma in 8-bit
/// intensity units; sigma == 0 leaves the image untouched.
void add_gaussian_noise(Image& image, double sigma, std::uint64_t seed);
void add_gaussian_noise_serial(Image& image, double sigma, std::uint64_t seed);

/// Opaque copy of src onto dst with top-left corner at (x, y), clipped.
void paste(Image& dst, const Image& src, int x, int y);
void paste_serial(Image& dst, const Image& src, int x, int y);

// Simple drawing used by the bundled layout stub and texture generator.
void fill_rect(Image& image, int x1, int y1, int x2, int y2, std::uint8_t r, std::uint8_t g,
               std::uint8_t b);
void draw_rect_border(Image& image, int x1, int y1, int x2, int y2, std::uint8_t r,
                      std::uint8_t g, std::uint8_t b);
void draw_line(Image& image, int x1, int y1, int x2, int y2, std::uint8_t r, std::uint8_t g,
               std::uint8_t b);

} // namespace mindkit
