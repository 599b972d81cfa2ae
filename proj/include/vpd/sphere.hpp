#pragma once

#include <cstdint>
#include <vector>

#include "vpd/camera.hpp"
#include "vpd/hough.hpp"

namespace vpd {

/// Cell index over canonical hemisphere points for nearest-neighbor and
/// range queries under the antipodal metric. Cells are uniform bands of
/// polar angle split into azimuth sectors sized to the band circumference.
/// The index stores bucket contents only; queries take the point array they
/// were built from, which keeps the structure trivially movable.
class SphereIndex {
public:
    SphereIndex() = default;
    SphereIndex(const std::vector<Vec3>& points, double cell_angle);

    /// Index of the nearest point to p by angular distance (antipodal
    /// aware); -1 when the index is empty. Ties resolve to the lowest index.
    int nearest(const std::vector<Vec3>& points, const Vec3& p) const;

    /// All indices within angular radius `r` of p (antipodal aware).
    void query(const std::vector<Vec3>& points, const Vec3& p, double r,
               std::vector<std::uint32_t>& out) const;

    bool empty() const { return n_points_ == 0; }

private:
    void cap_query(const std::vector<Vec3>& points, const Vec3& p, double r,
                   std::vector<std::uint32_t>& out) const;
    int band_of(double polar) const;

    std::size_t n_points_ = 0;
    double cell_angle_ = 0.0;
    int n_bands_ = 0;
    std::vector<int> band_sectors_;            // sectors per band
    std::vector<std::uint32_t> band_offset_;   // first cell id of each band
    std::vector<std::vector<std::uint32_t>> cells_;
};

/// Near-uniform point set on the canonical hemisphere: a full-sphere
/// Fibonacci spiral folded through canonicalize, with a directed k-NN graph.
struct SphereLattice {
    std::vector<Vec3> points;
    int k = 0;
    std::vector<std::uint32_t> knn;  // k entries per point
    std::size_t fold_collisions = 0;
    SphereIndex index;

    std::size_t size() const { return points.size(); }
    /// Characteristic spacing sqrt(2*pi/N) of the hemisphere sampling.
    double spacing() const;

    const std::uint32_t* neighbors(std::size_t i) const { return &knn[i * k]; }

    int nearest(const Vec3& p) const { return index.nearest(points, p); }
    void query(const Vec3& p, double r, std::vector<std::uint32_t>& out) const {
        index.query(points, p, r, out);
    }

    /// FNV-1a over the point coordinates, n and k; identifies the lattice in
    /// cache files.
    std::uint64_t content_hash() const;
};

/// Builds the lattice. Fold collisions (antipodal duplicates) are removed
/// and counted; for the sizes used here the count is zero.
SphereLattice fibonacci_hemisphere(std::size_t n, int k = 16, unsigned jobs = 0);

/// Maximum angular distance from any hemisphere point to its nearest lattice
/// point, measured with a deterministic probe battery (a denser Fibonacci
/// probe set plus all k-NN midpoints).
double measure_covering_radius(const SphereLattice& lattice, unsigned jobs = 0);

/// Plane normal of the great circle an image line maps to: two points on the
/// line are lifted through the camera and crossed. The line lives in grid
/// coordinates (origin at grid center); `k` must be the grid-scaled camera.
Vec3 line_normal(const GridLine& line, const HoughParams& params, const CameraIntrinsics& k);

/// Elevation of the great circle with plane normal n at azimuth alpha,
/// folded to [-pi/2, pi/2]. Pole-crossing circles (|n_y| < 1e-12) return
/// +/-pi/2, with +pi/2 when the numerator vanishes as well.
double great_circle_elevation(double alpha, const Vec3& n);

/// Point of the great circle with normal n at the azimuth whose sine/cosine
/// are given, in canonical form. Algebraically identical to
/// sph_to_vec(alpha, great_circle_elevation(alpha, n)) but avoids the
/// arctangent; the degenerate direction falls back to the pole convention.
Vec3 great_circle_point(double sin_alpha, double cos_alpha, const Vec3& n);

/// Per-lattice-point accumulated evidence.
struct SphereField {
    const SphereLattice* lattice = nullptr;
    std::vector<double> values;

    SphereField() = default;
    explicit SphereField(const SphereLattice& l) : lattice(&l), values(l.size(), 0.0) {}

    double total() const;
    std::size_t argmax() const;  // lowest index wins ties
};

}  // namespace vpd
