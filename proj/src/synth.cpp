#include <algorithm>
#include <cmath>

#include "vpd/mat3.hpp"
#include "vpd/random.hpp"
#include "vpd/synth.hpp"

namespace vpd {

namespace {

void draw_segment(GrayImage& img, const Segment& s, RasterMode mode) {
    // Coverage rasterization: every pixel near the segment gets a strength
    // from a tent profile of its perpendicular distance (or a hard 0.5 px
    // cut in binary mode).
    double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
    double len = std::hypot(dx, dy);
    if (len < 1e-9) return;
    double ux = dx / len, uy = dy / len;

    int min_x = std::max(0, static_cast<int>(std::floor(std::min(s.x0, s.x1) - 2.0)));
    int max_x = std::min(img.width - 1, static_cast<int>(std::ceil(std::max(s.x0, s.x1) + 2.0)));
    int min_y = std::max(0, static_cast<int>(std::floor(std::min(s.y0, s.y1) - 2.0)));
    int max_y = std::min(img.height - 1, static_cast<int>(std::ceil(std::max(s.y0, s.y1) + 2.0)));

    for (int py = min_y; py <= max_y; ++py) {
        for (int px = min_x; px <= max_x; ++px) {
            double rx = (px + 0.5) - s.x0, ry = (py + 0.5) - s.y0;
            double t = std::clamp(rx * ux + ry * uy, 0.0, len);
            double ex = rx - t * ux, ey = ry - t * uy;
            double d = std::hypot(ex, ey);
            float v;
            if (mode == RasterMode::binary) {
                v = d <= 0.5 ? 1.0f : 0.0f;
            } else {
                v = static_cast<float>(std::clamp(1.25 - d, 0.0, 1.0));
            }
            if (v > img.at(px, py)) img.at(px, py) = v;
        }
    }
}

/// Clips the segment from P0 to P1 against the image rectangle; returns
/// false when nothing remains.
bool clip_to_image(double& x0, double& y0, double& x1, double& y1, int w, int h) {
    // Liang-Barsky on [0.5, w-0.5] x [0.5, h-0.5] (pixel centers).
    double t0 = 0.0, t1 = 1.0;
    double dx = x1 - x0, dy = y1 - y0;
    auto clip = [&](double p, double q) {
        if (p == 0.0) return q >= 0.0;
        double r = q / p;
        if (p < 0.0) {
            if (r > t1) return false;
            if (r > t0) t0 = r;
        } else {
            if (r < t0) return false;
            if (r < t1) t1 = r;
        }
        return true;
    };
    double lo = 0.5, hi_x = w - 0.5, hi_y = h - 0.5;
    if (!clip(-dx, x0 - lo) || !clip(dx, hi_x - x0) || !clip(-dy, y0 - lo) ||
        !clip(dy, hi_y - y0))
        return false;
    double nx0 = x0 + t0 * dx, ny0 = y0 + t0 * dy;
    double nx1 = x0 + t1 * dx, ny1 = y0 + t1 * dy;
    x0 = nx0;
    y0 = ny0;
    x1 = nx1;
    y1 = ny1;
    return true;
}

/// Random orthonormal frame from two gaussian directions.
std::array<Vec3, 3> random_frame(Rng& rng) {
    Vec3 a = rng.unit_vector();
    Vec3 b;
    do {
        b = rng.unit_vector();
    } while (std::abs(a.dot(b)) > 0.95);
    Vec3 c = a.cross(b).normalized();
    b = c.cross(a).normalized();
    return {a, b, c};
}

struct Projected {
    double x, y;
};

Projected project(const Vec3& p, const CameraIntrinsics& k) {
    return {k.focal * p.x / p.z + k.cx, k.focal * p.y / p.z + k.cy};
}

}  // namespace

void SceneSpec::validate() const {
    if (n_directions < 1 || n_directions > 8)
        throw InvalidArgument("scene: n_directions must be in 1..8");
    if (manhattan && n_directions != 3)
        throw InvalidArgument("scene: manhattan scenes have exactly 3 directions");
    if (lines_per_direction < 1) throw InvalidArgument("scene: need lines_per_direction >= 1");
    if (jitter_sigma < 0.0 || outlier_fraction < 0.0)
        throw InvalidArgument("scene: noise parameters must be >= 0");
}

Scene generate_scene(const SceneSpec& spec) {
    spec.validate();
    const CameraIntrinsics& k = spec.intrinsics;
    Rng rng(spec.seed);

    const int w = k.width, h = k.height;
    const double min_seg_px = 0.18 * std::min(w, h);

    for (int attempt = 0; attempt < 100; ++attempt) {
        // Direction frame.
        std::vector<Vec3> dirs;
        if (spec.manhattan) {
            auto frame = random_frame(rng);
            dirs.assign(frame.begin(), frame.end());
        } else {
            int guard = 0;
            while (static_cast<int>(dirs.size()) < spec.n_directions && guard++ < 1000) {
                Vec3 d = rng.unit_vector();
                bool ok = true;
                for (const Vec3& e : dirs)
                    if (angular_distance(d, e) < spec.min_separation_rad) {
                        ok = false;
                        break;
                    }
                if (ok) dirs.push_back(d);
            }
            if (static_cast<int>(dirs.size()) < spec.n_directions) continue;
        }

        Scene scene;
        scene.image = GrayImage(w, h, 0.0f);
        for (const Vec3& d : dirs) scene.truth.directions.push_back(canonicalize(d));

        bool feasible = true;
        for (int f = 0; f < static_cast<int>(dirs.size()) && feasible; ++f) {
            const Vec3& d = dirs[f];
            int placed = 0;
            for (int tries = 0; tries < 400 && placed < spec.lines_per_direction; ++tries) {
                // A 3D segment along d through a point seen inside the image.
                double px = rng.uniform(0.15 * w, 0.85 * w);
                double py = rng.uniform(0.15 * h, 0.85 * h);
                double depth = rng.uniform(4.0, 10.0);
                Vec3 mid = lift_pixel(px, py, k) * depth;

                // Keep the segment well in front of the camera.
                double t_max = 0.45 * depth / std::max(0.05, std::abs(d.z));
                t_max = std::min(t_max, 6.0);
                double half = rng.uniform(0.3, 1.0) * t_max;
                Vec3 p0 = mid - d * half;
                Vec3 p1 = mid + d * half;
                if (p0.z < 0.5 || p1.z < 0.5) continue;

                Projected a = project(p0, k), b = project(p1, k);
                double x0 = a.x, y0 = a.y, x1 = b.x, y1 = b.y;
                if (!clip_to_image(x0, y0, x1, y1, w, h)) continue;
                if (std::hypot(x1 - x0, y1 - y0) < min_seg_px) continue;

                Segment seg{f, x0, y0, x1, y1};
                if (spec.jitter_sigma > 0.0) {
                    seg.x0 += rng.normal(spec.jitter_sigma);
                    seg.y0 += rng.normal(spec.jitter_sigma);
                    seg.x1 += rng.normal(spec.jitter_sigma);
                    seg.y1 += rng.normal(spec.jitter_sigma);
                }
                scene.truth.segments.push_back(seg);
                ++placed;
            }
            if (placed < spec.lines_per_direction) feasible = false;
        }
        if (!feasible) continue;

        // Outlier clutter: unrelated random chords.
        int n_real = static_cast<int>(scene.truth.segments.size());
        int n_outliers = static_cast<int>(std::floor(spec.outlier_fraction * n_real));
        for (int i = 0; i < n_outliers; ++i) {
            Segment seg{-1, rng.uniform(0.0, w - 1.0), rng.uniform(0.0, h - 1.0),
                        rng.uniform(0.0, w - 1.0), rng.uniform(0.0, h - 1.0)};
            if (std::hypot(seg.x1 - seg.x0, seg.y1 - seg.y0) < 0.1 * std::min(w, h)) {
                --i;
                continue;
            }
            scene.truth.segments.push_back(seg);
        }

        for (const Segment& s : scene.truth.segments) draw_segment(scene.image, s, spec.raster);
        return scene;
    }
    throw InfeasibleSpec("generate_scene: could not realize the spec after 100 attempts");
}

std::vector<Vec3> oracle_vps(const SceneTruth& truth, const CameraIntrinsics& k) {
    std::vector<Vec3> out;
    for (int f = 0; f < static_cast<int>(truth.directions.size()); ++f) {
        // Plane normal per segment straight from the endpoint rays; no
        // shared pipeline code on purpose.
        std::vector<Vec3> normals;
        for (const Segment& s : truth.segments) {
            if (s.family != f) continue;
            Vec3 a{s.x0 - k.cx, s.y0 - k.cy, k.focal};
            Vec3 b{s.x1 - k.cx, s.y1 - k.cy, k.focal};
            Vec3 n = a.cross(b);
            double norm = n.norm();
            if (norm < 1e-12) continue;
            normals.push_back(n * (1.0 / norm));
        }
        if (normals.size() < 2)
            throw DegenerateFamily("oracle_vps: family " + std::to_string(f) +
                                   " has fewer than 2 usable segments");

        Mat3 cov{};
        for (const Vec3& n : normals) {
            cov.col[0] = cov.col[0] + n * n.x;
            cov.col[1] = cov.col[1] + n * n.y;
            cov.col[2] = cov.col[2] + n * n.z;
        }
        Vec3 v = smallest_eigenvector(cov);
        double spread = 0.0;  // guard against all-parallel normals
        for (const Vec3& n : normals) spread = std::max(spread, std::abs(n.cross(normals[0]).norm()));
        if (spread < 1e-9)
            throw DegenerateFamily("oracle_vps: family " + std::to_string(f) +
                                   " normals are parallel");
        out.push_back(canonicalize(v));
    }
    return out;
}

}  // namespace vpd
