#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vpd/error.hpp"

namespace vpd {

/// Row-major luminance image, values in [0, 1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.0f)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

/// Edge strength per pixel, in [0, 1]; zero where there is no evidence.
struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    EdgeMap() = default;
    EdgeMap(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0f) {}

    float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// 8-bit RGB image, used only for overlay rendering.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;  // 3 bytes per pixel

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t* px(int x, int y) { return &values[(static_cast<std::size_t>(y) * width + x) * 3]; }
};

/// Loads PGM/PPM (binary) or PNG (8/16-bit); color converts to luminance with
/// the usual 0.299/0.587/0.114 weights.
GrayImage load_image(const std::string& path);

void save_pgm(const GrayImage& img, const std::string& path);
void save_ppm(const RgbImage& img, const std::string& path);

struct ResizedImage {
    GrayImage image;
    double scale = 1.0;  // grid pixels per source pixel
};

/// Resamples onto a side x side grid with a single isotropic scale factor
/// side/max(w, h); downscales by exact area averaging, upscales bilinearly.
/// Non-square sources are anchored top-left and zero padded.
ResizedImage resize_to_grid(const GrayImage& img, int side);

}  // namespace vpd
