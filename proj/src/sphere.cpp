#include <algorithm>
#include <cmath>
#include <mutex>

#include "vpd/parallel.hpp"
#include "vpd/sphere.hpp"

namespace vpd {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGoldenAngle = 2.39996322972865332223;  // pi * (3 - sqrt(5))

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// SphereIndex

SphereIndex::SphereIndex(const std::vector<Vec3>& points, double cell_angle)
    : n_points_(points.size()), cell_angle_(cell_angle) {
    // Canonical points have z >= 0, i.e. polar angle in [0, pi/2].
    n_bands_ = std::max(1, static_cast<int>(std::ceil(0.5 * kPi / cell_angle_)));
    band_sectors_.resize(n_bands_);
    band_offset_.resize(n_bands_ + 1);
    std::uint32_t total = 0;
    for (int b = 0; b < n_bands_; ++b) {
        double mid = (b + 0.5) * 0.5 * kPi / n_bands_;
        int ns = std::max(1, static_cast<int>(std::ceil(2.0 * kPi * std::sin(mid) / cell_angle_)));
        band_sectors_[b] = ns;
        band_offset_[b] = total;
        total += static_cast<std::uint32_t>(ns);
    }
    band_offset_[n_bands_] = total;
    cells_.resize(total);

    for (std::uint32_t i = 0; i < points.size(); ++i) {
        const Vec3& p = points[i];
        double polar = std::acos(std::clamp(p.z, -1.0, 1.0));
        int b = band_of(polar);
        double az = std::atan2(p.y, p.x);  // (-pi, pi]
        int ns = band_sectors_[b];
        int s = static_cast<int>((az + kPi) / (2.0 * kPi) * ns);
        s = std::clamp(s, 0, ns - 1);
        cells_[band_offset_[b] + s].push_back(i);
    }
}

int SphereIndex::band_of(double polar) const {
    int b = static_cast<int>(polar / (0.5 * kPi) * n_bands_);
    return std::clamp(b, 0, n_bands_ - 1);
}

void SphereIndex::cap_query(const std::vector<Vec3>& points, const Vec3& p, double r,
                            std::vector<std::uint32_t>& out) const {
    const double polar = std::acos(std::clamp(p.z, -1.0, 1.0));
    const double cos_r = std::cos(r);

    int b_lo = band_of(std::max(0.0, polar - r));
    int b_hi = band_of(std::min(0.5 * kPi, polar + r));
    const double az = std::atan2(p.y, p.x);

    // Widest azimuth half-extent of the cap over all polar angles; pi when
    // the cap contains a pole.
    double max_dphi;
    if (polar <= r || polar + r >= kPi) {
        max_dphi = kPi;
    } else {
        max_dphi = std::asin(std::min(1.0, std::sin(r) / std::sin(polar))) + 1e-9;
    }

    for (int b = b_lo; b <= b_hi; ++b) {
        int ns = band_sectors_[b];
        int s_begin = 0, s_count = ns;
        if (max_dphi < kPi) {
            int s0 = static_cast<int>(std::floor((az - max_dphi + kPi) / (2.0 * kPi) * ns));
            int s1 = static_cast<int>(std::floor((az + max_dphi + kPi) / (2.0 * kPi) * ns));
            s_begin = s0;
            s_count = s1 - s0 + 1;
            if (s_count >= ns) {
                s_begin = 0;
                s_count = ns;
            }
        }
        for (int si = 0; si < s_count; ++si) {
            int s = ((s_begin + si) % ns + ns) % ns;
            for (std::uint32_t idx : cells_[band_offset_[b] + s]) {
                const Vec3& q = points[idx];
                if (std::abs(p.dot(q)) >= cos_r) out.push_back(idx);
            }
        }
    }
}

void SphereIndex::query(const std::vector<Vec3>& points, const Vec3& p, double r,
                        std::vector<std::uint32_t>& out) const {
    out.clear();
    if (empty()) return;
    r = std::min(r, kPi);
    cap_query(points, p, r, out);
    // Near the equator the antipodal image of the cap pokes into the
    // canonical hemisphere; query around -p as well.
    if (p.z <= std::sin(r)) {
        std::size_t before = out.size();
        cap_query(points, -p, r, out);
        if (before != 0 && out.size() > before) {
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
        }
    }
}

int SphereIndex::nearest(const std::vector<Vec3>& points, const Vec3& p) const {
    if (empty()) return -1;
    thread_local std::vector<std::uint32_t> hits;
    double r = std::max(cell_angle_, 1e-4);
    for (int attempt = 0; attempt < 24; ++attempt) {
        query(points, p, r, hits);
        if (!hits.empty()) {
            int best = -1;
            double best_dot = -1.0;
            for (std::uint32_t idx : hits) {
                double d = std::abs(p.dot(points[idx]));
                if (d > best_dot || (d == best_dot && static_cast<int>(idx) < best)) {
                    best_dot = d;
                    best = static_cast<int>(idx);
                }
            }
            return best;
        }
        r *= 2.0;
        if (r > kPi) break;
    }
    // Exhaustive fallback; unreachable for nonempty lattices.
    int best = 0;
    double best_dot = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double d = std::abs(p.dot(points[i]));
        if (d > best_dot) {
            best_dot = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Lattice

double SphereLattice::spacing() const {
    return points.empty() ? kPi : std::sqrt(2.0 * kPi / static_cast<double>(points.size()));
}

std::uint64_t SphereLattice::content_hash() const {
    std::uint64_t h = fnv1a64(&k, sizeof(k));
    std::uint64_t n = points.size();
    h = fnv1a64(&n, sizeof(n), h);
    h = fnv1a64(points.data(), points.size() * sizeof(Vec3), h);
    return h;
}

SphereLattice fibonacci_hemisphere(std::size_t n, int k, unsigned jobs) {
    if (n < 1) throw InvalidArgument("fibonacci_hemisphere: need n >= 1");
    if (k < 0) throw InvalidArgument("fibonacci_hemisphere: need k >= 0");
    if (jobs == 0) jobs = default_jobs();

    SphereLattice lat;
    lat.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(n);
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = kGoldenAngle * static_cast<double>(i);
        lat.points.push_back(canonicalize({r * std::cos(phi), r * std::sin(phi), z}));
    }

    // Remove exact antipodal fold collisions (none occur in practice).
    {
        std::vector<Vec3> sorted = lat.points;
        std::sort(sorted.begin(), sorted.end(), [](const Vec3& a, const Vec3& b) {
            if (a.z != b.z) return a.z < b.z;
            if (a.y != b.y) return a.y < b.y;
            return a.x < b.x;
        });
        std::size_t unique_n = static_cast<std::size_t>(
            std::distance(sorted.begin(), std::unique(sorted.begin(), sorted.end())));
        lat.fold_collisions = n - unique_n;
        if (lat.fold_collisions > 0) {
            std::vector<Vec3> dedup;
            dedup.reserve(unique_n);
            for (const Vec3& p : lat.points) {
                bool seen = false;
                for (const Vec3& q : dedup)
                    if (q == p) {
                        seen = true;
                        break;
                    }
                if (!seen) dedup.push_back(p);
            }
            lat.points = std::move(dedup);
        }
    }

    lat.k = std::min<int>(k, static_cast<int>(lat.points.size()) - 1);
    lat.index = SphereIndex(lat.points, std::max(2.5 * lat.spacing(), 1e-3));

    // Directed k-NN lists via expanding range queries.
    if (lat.k > 0) {
        lat.knn.assign(lat.points.size() * lat.k, 0);
        parallel_for(lat.points.size(), jobs, [&](std::size_t i) {
            thread_local std::vector<std::uint32_t> hits;
            const Vec3& p = lat.points[i];
            double r = 2.5 * lat.spacing();
            for (;;) {
                lat.query(p, r, hits);
                if (static_cast<int>(hits.size()) >= lat.k + 1 || r > kPi) break;
                r *= 1.7;
            }
            std::sort(hits.begin(), hits.end(), [&](std::uint32_t a, std::uint32_t b) {
                double da = std::abs(p.dot(lat.points[a]));
                double db = std::abs(p.dot(lat.points[b]));
                if (da != db) return da > db;
                return a < b;
            });
            int written = 0;
            for (std::uint32_t idx : hits) {
                if (idx == i) continue;
                lat.knn[i * lat.k + written] = idx;
                if (++written == lat.k) break;
            }
            // written == lat.k is guaranteed by the expanding query above.
        });
    }
    return lat;
}

double measure_covering_radius(const SphereLattice& lattice, unsigned jobs) {
    if (lattice.points.empty()) return kPi;
    if (jobs == 0) jobs = default_jobs();
    const std::size_t n_probe = std::max<std::size_t>(50000, 6 * lattice.size());

    std::vector<double> worst(64, 0.0);
    parallel_chunks(n_probe, jobs, [&](std::size_t c, std::size_t b, std::size_t e) {
        double w = worst[c];
        for (std::size_t i = b; i < e; ++i) {
            // Offset spiral so probes do not ride the lattice's own spiral.
            double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(n_probe);
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double phi = kGoldenAngle * (static_cast<double>(i) + 0.618033988749894848);
            Vec3 p = canonicalize({r * std::cos(phi), r * std::sin(phi), z});
            int idx = lattice.nearest(p);
            w = std::max(w, angular_distance(p, lattice.points[idx]));
        }
        worst[c] = w;
    }, 64);

    // k-NN edge midpoints probe the Voronoi boundaries directly.
    std::vector<double> worst_mid(64, 0.0);
    if (lattice.k > 0) {
        parallel_chunks(lattice.size(), jobs, [&](std::size_t c, std::size_t b, std::size_t e) {
            double w = worst_mid[c];
            for (std::size_t i = b; i < e; ++i) {
                const Vec3& p = lattice.points[i];
                for (int j = 0; j < lattice.k; ++j) {
                    Vec3 q = lattice.points[lattice.neighbors(i)[j]];
                    if (p.dot(q) < 0.0) q = -q;
                    Vec3 m = p + q;
                    double norm = m.norm();
                    if (norm < 1e-12) continue;
                    m = canonicalize(m * (1.0 / norm));
                    int idx = lattice.nearest(m);
                    w = std::max(w, angular_distance(m, lattice.points[idx]));
                }
            }
            worst_mid[c] = w;
        }, 64);
    }

    double r = 0.0;
    for (double w : worst) r = std::max(r, w);
    for (double w : worst_mid) r = std::max(r, w);
    return r;
}

// ---------------------------------------------------------------------------
// Great-circle geometry

Vec3 line_normal(const GridLine& line, const HoughParams& params, const CameraIntrinsics& k) {
    const double center = 0.5 * (params.grid_side - 1);
    const double c = std::cos(line.theta), s = std::sin(line.theta);
    // Foot of the perpendicular and the line direction, in grid pixels.
    const double fx = line.rho * c, fy = line.rho * s;
    const double dx = -s, dy = c;
    const double t = params.grid_side;  // spread the two samples well apart

    Vec3 a = lift_pixel(fx - t * dx + center, fy - t * dy + center, k);
    Vec3 b = lift_pixel(fx + t * dx + center, fy + t * dy + center, k);
    Vec3 n = a.cross(b);
    double norm = n.norm();
    if (norm < 1e-15) throw DegenerateLine("line_normal: lifted rays are parallel");
    return canonicalize(n * (1.0 / norm));
}

double great_circle_elevation(double alpha, const Vec3& n) {
    double num = -n.x * std::sin(alpha) - n.z * std::cos(alpha);
    double den = n.y;
    if (std::abs(den) < 1e-12) {
        if (num == 0.0) return 0.5 * kPi;
        return num > 0.0 ? 0.5 * kPi : -0.5 * kPi;
    }
    if (den < 0.0) {
        num = -num;
        den = -den;
    }
    return std::atan2(num, den);
}

Vec3 great_circle_point(double sin_alpha, double cos_alpha, const Vec3& n) {
    // p ~ (den*sin(a), num, den*cos(a)) with num/den = tan(beta); exactly
    // orthogonal to n by construction.
    double num = -n.x * sin_alpha - n.z * cos_alpha;
    double den = n.y;
    double norm = std::sqrt(num * num + den * den);
    if (norm < 1e-12) return {0.0, 1.0, 0.0};  // pole convention, beta = pi/2
    double inv = 1.0 / norm;
    return canonicalize({den * sin_alpha * inv, num * inv, den * cos_alpha * inv});
}

// ---------------------------------------------------------------------------
// SphereField

double SphereField::total() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

std::size_t SphereField::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

}  // namespace vpd
