#include <algorithm>
#include <cmath>

#include "vpd/image.hpp"

namespace vpd {

namespace {

// Integral of the source image over the box [x0,x1]x[y0,y1] in source pixel
// coordinates (pixel i covers [i, i+1)), divided by the box area.
float box_average(const GrayImage& src, double x0, double x1, double y0, double y1) {
    x0 = std::max(0.0, x0);
    y0 = std::max(0.0, y0);
    x1 = std::min<double>(src.width, x1);
    y1 = std::min<double>(src.height, y1);
    if (x1 <= x0 || y1 <= y0) return 0.0f;

    int ix0 = static_cast<int>(std::floor(x0));
    int ix1 = static_cast<int>(std::ceil(x1));
    int iy0 = static_cast<int>(std::floor(y0));
    int iy1 = static_cast<int>(std::ceil(y1));

    double sum = 0.0;
    for (int y = iy0; y < iy1; ++y) {
        double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
        for (int x = ix0; x < ix1; ++x) {
            double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
            sum += wx * wy * src.at(x, y);
        }
    }
    return static_cast<float>(sum / ((x1 - x0) * (y1 - y0)));
}

float bilinear(const GrayImage& src, double x, double y) {
    // Sample at pixel centers (i + 0.5).
    double fx = x - 0.5, fy = y - 0.5;
    int x0 = static_cast<int>(std::floor(fx));
    int y0 = static_cast<int>(std::floor(fy));
    double tx = fx - x0, ty = fy - y0;
    auto tap = [&](int xi, int yi) {
        xi = std::clamp(xi, 0, src.width - 1);
        yi = std::clamp(yi, 0, src.height - 1);
        return static_cast<double>(src.at(xi, yi));
    };
    double top = tap(x0, y0) * (1 - tx) + tap(x0 + 1, y0) * tx;
    double bot = tap(x0, y0 + 1) * (1 - tx) + tap(x0 + 1, y0 + 1) * tx;
    return static_cast<float>(top * (1 - ty) + bot * ty);
}

}  // namespace

ResizedImage resize_to_grid(const GrayImage& img, int side) {
    if (side <= 0) throw InvalidArgument("resize_to_grid: side must be positive");
    if (img.width <= 0 || img.height <= 0) throw InvalidArgument("resize_to_grid: empty image");

    double scale = static_cast<double>(side) / std::max(img.width, img.height);
    ResizedImage out;
    out.scale = scale;
    out.image = GrayImage(side, side, 0.0f);

    if (img.width == side && img.height == side) {
        out.image.values = img.values;
        return out;
    }

    int content_w = std::min(side, static_cast<int>(std::ceil(img.width * scale)));
    int content_h = std::min(side, static_cast<int>(std::ceil(img.height * scale)));
    double inv = 1.0 / scale;

    for (int y = 0; y < content_h; ++y) {
        for (int x = 0; x < content_w; ++x) {
            float v;
            if (scale < 1.0) {
                v = box_average(img, x * inv, (x + 1) * inv, y * inv, (y + 1) * inv);
            } else {
                v = bilinear(img, (x + 0.5) * inv, (y + 0.5) * inv);
            }
            out.image.at(x, y) = v;
        }
    }
    return out;
}

}  // namespace vpd
