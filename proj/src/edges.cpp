#include <algorithm>
#include <cmath>
#include <vector>

#include "vpd/edges.hpp"

namespace vpd {

namespace {

std::vector<float> gaussian_blur(const std::vector<float>& src, int w, int h, double sigma) {
    if (sigma <= 0.0) return src;
    int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };

    std::vector<float> tmp(src.size()), out(src.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * src[y * w + clampi(x + i, 0, w - 1)];
            tmp[y * w + x] = static_cast<float>(acc);
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp[clampi(y + i, 0, h - 1) * w + x];
            out[y * w + x] = static_cast<float>(acc);
        }
    }
    return out;
}

}  // namespace

EdgeMap detect_edges(const GrayImage& img, const EdgeConfig& cfg) {
    cfg.validate();
    const int w = img.width, h = img.height;
    EdgeMap edges(w, h);
    if (w < 3 || h < 3) return edges;

    std::vector<float> smooth = gaussian_blur(img.values, w, h, cfg.sigma);

    // Sobel gradients; border pixels keep zero gradient.
    std::vector<float> gx(smooth.size(), 0.0f), gy(smooth.size(), 0.0f), mag(smooth.size(), 0.0f);
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            std::size_t i = static_cast<std::size_t>(y) * w + x;
            float dx = (smooth[i - w + 1] + 2.0f * smooth[i + 1] + smooth[i + w + 1]) -
                       (smooth[i - w - 1] + 2.0f * smooth[i - 1] + smooth[i + w - 1]);
            float dy = (smooth[i + w - 1] + 2.0f * smooth[i + w] + smooth[i + w + 1]) -
                       (smooth[i - w - 1] + 2.0f * smooth[i - w] + smooth[i - w + 1]);
            gx[i] = dx;
            gy[i] = dy;
            mag[i] = std::hypot(dx, dy);
        }
    }

    // Non-maximum suppression along the quantized gradient direction. The
    // comparison is strict toward the "backward" neighbor and non-strict
    // toward the "forward" one, so a symmetric two-pixel plateau keeps
    // exactly one pixel.
    std::vector<float> thin(smooth.size(), 0.0f);
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            std::size_t i = static_cast<std::size_t>(y) * w + x;
            float m = mag[i];
            if (m <= 0.0f) continue;
            float ax = std::abs(gx[i]), ay = std::abs(gy[i]);
            int dx, dy;
            if (ax >= 2.414f * ay) {
                dx = 1; dy = 0;                       // horizontal gradient
            } else if (ay >= 2.414f * ax) {
                dx = 0; dy = 1;                       // vertical gradient
            } else if ((gx[i] > 0) == (gy[i] > 0)) {
                dx = 1; dy = 1;                       // 45 degrees
            } else {
                dx = 1; dy = -1;                      // 135 degrees
            }
            float fwd = mag[i + static_cast<std::ptrdiff_t>(dy) * w + dx];
            float bwd = mag[i - static_cast<std::ptrdiff_t>(dy) * w - dx];
            if (m > bwd && m >= fwd) thin[i] = m;
        }
    }

    // Quantile thresholds over the magnitudes of NMS survivors.
    std::vector<float> nonzero;
    nonzero.reserve(smooth.size() / 8);
    for (float v : thin)
        if (v > 0.0f) nonzero.push_back(v);
    if (nonzero.empty()) return edges;

    auto quantile = [&](double q) {
        std::size_t k = static_cast<std::size_t>(q * (nonzero.size() - 1));
        std::nth_element(nonzero.begin(), nonzero.begin() + k, nonzero.end());
        return nonzero[k];
    };
    float high = quantile(cfg.high_quantile);
    float low = quantile(cfg.low_quantile);

    // Hysteresis: seed from strong pixels, grow through weak ones (8-conn).
    std::vector<std::uint8_t> state(smooth.size(), 0);  // 1 = weak, 2 = kept
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < thin.size(); ++i) {
        if (thin[i] <= 0.0f) continue;
        if (thin[i] >= high) {
            state[i] = 2;
            stack.push_back(i);
        } else if (thin[i] >= low) {
            state[i] = 1;
        }
    }
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                int nx = x + dx, ny = y + dy;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                if (state[j] == 1) {
                    state[j] = 2;
                    stack.push_back(j);
                }
            }
        }
    }

    float max_mag = 0.0f;
    for (std::size_t i = 0; i < thin.size(); ++i)
        if (state[i] == 2) max_mag = std::max(max_mag, thin[i]);
    if (max_mag <= 0.0f) return edges;

    for (std::size_t i = 0; i < thin.size(); ++i)
        if (state[i] == 2) edges.values[i] = thin[i] / max_mag;
    return edges;
}

}  // namespace vpd
