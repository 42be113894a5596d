#include "mindkit/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "mindkit/errors.hpp"
#include "mindkit/rng.hpp"

namespace mindkit {

Image::Image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3) {
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
        pixels[i] = r;
        pixels[i + 1] = g;
        pixels[i + 2] = b;
    }
}

bool operator==(const Image& a, const Image& b) {
    return a.width == b.width && a.height == b.height && a.pixels == b.pixels;
}

namespace {

struct MemoryReader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos = 0;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t count) {
    auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
    if (reader->pos + count > reader->size) png_error(png, "read past end of PNG buffer");
    std::memcpy(out, reader->data + reader->pos, count);
    reader->pos += count;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t count) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + count);
}

void png_flush_noop(png_structp) {}

} // namespace

Image decode_png(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
        throw IoError("not a PNG stream");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    MemoryReader reader{bytes.data(), bytes.size()};
    Image image;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("corrupt PNG stream");
    }
    png_set_read_fn(png, &reader, png_read_from_memory);
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
        png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    image.width = static_cast<int>(png_get_image_width(png, info));
    image.height = static_cast<int>(png_get_image_height(png, info));
    image.pixels.resize(static_cast<std::size_t>(image.width) * image.height * 3);
    std::vector<png_bytep> rows(image.height);
    for (int y = 0; y < image.height; ++y) rows[y] = image.at(0, y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return image;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed");
    }
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    // Fast deflate: noise-augmented rasters are high-entropy, so the default
    // level buys little size for a lot of time on multi-megapixel maps.
    png_set_compression_level(png, 1);
    png_set_filter(png, 0, PNG_FILTER_SUB);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y)
        png_write_row(png, const_cast<png_bytep>(image.at(0, y)));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

Image load_png(const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open: " + path.string());
    std::vector<std::uint8_t> bytes;
    std::uint8_t buf[65536];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) bytes.insert(bytes.end(), buf, buf + got);
    std::fclose(f);
    return decode_png(bytes);
}

void save_png(const Image& image, const std::filesystem::path& path) {
    auto bytes = encode_png(image);
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot write: " + path.string());
    std::size_t written = std::fwrite(bytes.data(), 1, bytes.size(), f);
    std::fclose(f);
    if (written != bytes.size()) throw IoError("short write: " + path.string());
}

std::pair<int, int> read_png_dimensions(const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open: " + path.string());
    std::uint8_t header[24];
    std::size_t got = std::fread(header, 1, sizeof header, f);
    std::fclose(f);
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (got < 24 || std::memcmp(header, sig, 8) != 0 || std::memcmp(header + 12, "IHDR", 4) != 0)
        throw IoError("not a PNG file: " + path.string());
    auto be32 = [&](int off) {
        return (static_cast<std::uint32_t>(header[off]) << 24) |
               (static_cast<std::uint32_t>(header[off + 1]) << 16) |
               (static_cast<std::uint32_t>(header[off + 2]) << 8) |
               static_cast<std::uint32_t>(header[off + 3]);
    };
    return {static_cast<int>(be32(16)), static_cast<int>(be32(20))};
}

namespace {

inline void apply_noise(Image& image, std::size_t idx, float noise) {
    int v = static_cast<int>(image.pixels[idx]) + static_cast<int>(std::lroundf(noise));
    image.pixels[idx] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

// Box-Muller keyed on the absolute channel-pair index: the cos and sin
// outputs are independent normals, so one hash and one log serve two
// channels, and values do not depend on how rows are chunked across threads.
// Single precision is more than 8-bit output needs and halves the libm cost.
inline void noise_row(Image& image, int y, double sigma, std::uint64_t seed) {
    const std::size_t row_len = static_cast<std::size_t>(image.width) * 3;
    const std::size_t row_start = static_cast<std::size_t>(y) * row_len;
    constexpr float two_pi = 6.2831853071795864769f;
    const auto sigma_f = static_cast<float>(sigma);
    std::size_t i = 0;
    while (i < row_len) {
        const std::size_t idx = row_start + i;
        std::uint64_t s = hash_counter(seed, idx >> 1);
        const std::uint64_t bits = splitmix64(s);
        float u1 = static_cast<float>(bits >> 40) * 0x1.0p-24f;
        float u2 = static_cast<float>((bits >> 16) & 0xffffff) * 0x1.0p-24f;
        if (u1 <= 0) u1 = 0x1.0p-24f;
        const float r = sigma_f * std::sqrt(-2.0f * std::log(u1));
        const float angle = two_pi * u2;
        float c, sn;
#ifdef __GLIBC__
        ::sincosf(angle, &sn, &c);
#else
        c = std::cos(angle);
        sn = std::sin(angle);
#endif
        if ((idx & 1) == 0) {
            apply_noise(image, idx, r * c);
            if (i + 1 < row_len) {
                apply_noise(image, idx + 1, r * sn);
                i += 2;
            } else {
                i += 1;
            }
        } else { // pair began on the previous row
            apply_noise(image, idx, r * sn);
            i += 1;
        }
    }
}

} // namespace

void add_gaussian_noise(Image& image, double sigma, std::uint64_t seed) {
    if (sigma <= 0) return;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < image.height; ++y) noise_row(image, y, sigma, seed);
}

void add_gaussian_noise_serial(Image& image, double sigma, std::uint64_t seed) {
    if (sigma <= 0) return;
    for (int y = 0; y < image.height; ++y) noise_row(image, y, sigma, seed);
}

namespace {

struct PasteClip {
    int src_x0, src_y0, dst_x0, dst_y0, w, h;
};

bool clip_paste(const Image& dst, const Image& src, int x, int y, PasteClip& clip) {
    int sx0 = std::max(0, -x), sy0 = std::max(0, -y);
    int dx0 = std::max(0, x), dy0 = std::max(0, y);
    int w = std::min(src.width - sx0, dst.width - dx0);
    int h = std::min(src.height - sy0, dst.height - dy0);
    if (w <= 0 || h <= 0) return false;
    clip = {sx0, sy0, dx0, dy0, w, h};
    return true;
}

inline void paste_row(Image& dst, const Image& src, const PasteClip& c, int row) {
    std::memcpy(dst.at(c.dst_x0, c.dst_y0 + row), src.at(c.src_x0, c.src_y0 + row),
                static_cast<std::size_t>(c.w) * 3);
}

} // namespace

void paste(Image& dst, const Image& src, int x, int y) {
    PasteClip c;
    if (!clip_paste(dst, src, x, y, c)) return;
#pragma omp parallel for schedule(static)
    for (int row = 0; row < c.h; ++row) paste_row(dst, src, c, row);
}

void paste_serial(Image& dst, const Image& src, int x, int y) {
    PasteClip c;
    if (!clip_paste(dst, src, x, y, c)) return;
    for (int row = 0; row < c.h; ++row) paste_row(dst, src, c, row);
}

void fill_rect(Image& image, int x1, int y1, int x2, int y2, std::uint8_t r, std::uint8_t g,
               std::uint8_t b) {
    x1 = std::clamp(x1, 0, image.width);
    x2 = std::clamp(x2, 0, image.width);
    y1 = std::clamp(y1, 0, image.height);
    y2 = std::clamp(y2, 0, image.height);
    for (int y = y1; y < y2; ++y) {
        std::uint8_t* p = image.at(x1, y);
        for (int x = x1; x < x2; ++x) {
            *p++ = r;
            *p++ = g;
            *p++ = b;
        }
    }
}

void draw_rect_border(Image& image, int x1, int y1, int x2, int y2, std::uint8_t r,
                      std::uint8_t g, std::uint8_t b) {
    fill_rect(image, x1, y1, x2, y1 + 1, r, g, b);
    fill_rect(image, x1, y2 - 1, x2, y2, r, g, b);
    fill_rect(image, x1, y1, x1 + 1, y2, r, g, b);
    fill_rect(image, x2 - 1, y1, x2, y2, r, g, b);
}

void draw_line(Image& image, int x1, int y1, int x2, int y2, std::uint8_t r, std::uint8_t g,
               std::uint8_t b) {
    int dx = std::abs(x2 - x1), dy = -std::abs(y2 - y1);
    int sx = x1 < x2 ? 1 : -1, sy = y1 < y2 ? 1 : -1;
    int err = dx + dy;
    int x = x1, y = y1;
    while (true) {
        if (x >= 0 && x < image.width && y >= 0 && y < image.height) {
            std::uint8_t* p = image.at(x, y);
            p[0] = r;
            p[1] = g;
            p[2] = b;
        }
        if (x == x2 && y == y2) break;
        int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
}

} // namespace mindkit
