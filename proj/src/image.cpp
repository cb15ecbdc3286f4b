#include "ledit/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "ledit/common.hpp"
#include "ledit/kernels.hpp"

namespace ledit {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

uint8_t to_byte(float v) {
    float c = std::clamp(v, 0.0f, 1.0f);
    return static_cast<uint8_t>(std::lround(c * 255.0f));
}

void write_png(const std::string& path, int h, int w, int channels,
               const std::vector<uint8_t>& bytes) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png write failed: " + path);
    }
    png_init_io(png, fp.get());
    int color = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    // Fixed compression settings keep output bytes reproducible.
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_NONE);
    png_write_info(png, info);
    std::vector<png_bytep> rows(static_cast<size_t>(h));
    for (int y = 0; y < h; ++y)
        rows[y] = const_cast<png_bytep>(bytes.data() + static_cast<size_t>(y) * w * channels);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::vector<uint8_t> read_png(const std::string& path, int& h, int& w) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png decode failed: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    png_byte color = png_get_color_type(png, info);
    png_byte depth = png_get_bit_depth(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    std::vector<uint8_t> bytes(static_cast<size_t>(h) * w * 3);
    std::vector<png_bytep> rows(static_cast<size_t>(h));
    for (int y = 0; y < h; ++y) rows[y] = bytes.data() + static_cast<size_t>(y) * w * 3;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);
    return bytes;
}

// Viridis anchor points, linearly interpolated.
constexpr float kViridis[9][3] = {
    {0.267f, 0.005f, 0.329f}, {0.283f, 0.141f, 0.458f}, {0.254f, 0.265f, 0.530f},
    {0.207f, 0.372f, 0.553f}, {0.164f, 0.471f, 0.558f}, {0.128f, 0.567f, 0.551f},
    {0.135f, 0.659f, 0.518f}, {0.267f, 0.749f, 0.441f}, {0.993f, 0.906f, 0.144f}};

} // namespace

void write_png_rgb(const std::string& path, const Tensor& image) {
    if (image.shape().size() != 3 || image.dim(2) != 3)
        throw std::invalid_argument("write_png_rgb expects {H,W,3}");
    int h = image.dim(0), w = image.dim(1);
    std::vector<uint8_t> bytes(static_cast<size_t>(h) * w * 3);
    for (int64_t i = 0; i < image.size(); ++i) bytes[static_cast<size_t>(i)] = to_byte(image[i]);
    write_png(path, h, w, 3, bytes);
}

void write_png_gray(const std::string& path, const Tensor& map) {
    if (map.shape().size() != 2) throw std::invalid_argument("write_png_gray expects {H,W}");
    int h = map.dim(0), w = map.dim(1);
    std::vector<uint8_t> bytes(static_cast<size_t>(h) * w);
    for (int64_t i = 0; i < map.size(); ++i) bytes[static_cast<size_t>(i)] = to_byte(map[i]);
    write_png(path, h, w, 1, bytes);
}

Tensor read_png_rgb(const std::string& path) {
    int h = 0, w = 0;
    std::vector<uint8_t> bytes = read_png(path, h, w);
    Tensor img({h, w, 3});
    for (int64_t i = 0; i < img.size(); ++i)
        img[i] = static_cast<float>(bytes[static_cast<size_t>(i)]) / 255.0f;
    return img;
}

Tensor read_png_mask(const std::string& path) {
    Tensor rgb = read_png_rgb(path);
    int h = rgb.dim(0), w = rgb.dim(1);
    Tensor mask({h, w});
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            float luma = (rgb[(static_cast<int64_t>(y) * w + x) * 3] +
                          rgb[(static_cast<int64_t>(y) * w + x) * 3 + 1] +
                          rgb[(static_cast<int64_t>(y) * w + x) * 3 + 2]) /
                         3.0f;
            mask.at(y, x) = luma > 0.5f ? 1.0f : 0.0f;
        }
    return mask;
}

Tensor colormap_heat(const Tensor& map) {
    if (map.shape().size() != 2) throw std::invalid_argument("colormap_heat expects {H,W}");
    int h = map.dim(0), w = map.dim(1);
    Tensor out({h, w, 3});
    for (int64_t i = 0; i < map.size(); ++i) {
        float v = std::clamp(map[i], 0.0f, 1.0f) * 8.0f;
        int k = std::min(7, static_cast<int>(v));
        float f = v - static_cast<float>(k);
        for (int c = 0; c < 3; ++c)
            out[i * 3 + c] = kViridis[k][c] + f * (kViridis[k + 1][c] - kViridis[k][c]);
    }
    return out;
}

Tensor abs_diff_map(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("abs_diff_map: shape mismatch");
    int h = a.dim(0), w = a.dim(1);
    Tensor out({h, w});
    for (int64_t i = 0; i < out.size(); ++i) {
        float d = 0.0f;
        for (int c = 0; c < 3; ++c) d += std::fabs(a[i * 3 + c] - b[i * 3 + c]);
        out[i] = d / 3.0f;
    }
    return out;
}

double psnr(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("psnr: shape mismatch");
    double mse = kernels::sq_diff_sum(a.data(), b.data(), a.size()) / static_cast<double>(a.size());
    if (mse <= 0.0) return 99.0;
    return 10.0 * std::log10(1.0 / mse);
}

} // namespace ledit
