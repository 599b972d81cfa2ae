#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vpd/camera.hpp"
#include "vpd/image.hpp"

namespace vpd {

enum class RasterMode { antialiased, binary };

/// Declarative description of a synthetic line scene.
struct SceneSpec {
    std::uint64_t seed = 0;
    int n_directions = 3;
    int lines_per_direction = 8;
    bool manhattan = true;
    double jitter_sigma = 0.0;      // pixel noise on segment endpoints
    double outlier_fraction = 0.0;  // extra random segments, per real segment
    CameraIntrinsics intrinsics = CameraIntrinsics::centered(2.1 * 512, 512, 512);
    RasterMode raster = RasterMode::antialiased;
    double min_separation_rad = 0.26179938779914944;  // 15 degrees, non-manhattan

    void validate() const;
};

struct Segment {
    int family = -1;  // -1 for outliers
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

/// Exact ground truth for a generated scene.
struct SceneTruth {
    std::vector<Vec3> directions;  // canonical, one per family
    std::vector<Segment> segments;
};

struct Scene {
    GrayImage image;
    SceneTruth truth;
};

/// Renders a seeded line scene with exact vanishing-point ground truth.
/// Deterministic per seed.
Scene generate_scene(const SceneSpec& spec);

/// Brute-force vanishing points from the recorded segments alone: per family
/// the segment endpoint lifts are crossed into plane normals and the common
/// null direction is the smallest eigenvector of their covariance. No Hough
/// transform, no lattice, no shared pipeline code.
std::vector<Vec3> oracle_vps(const SceneTruth& truth, const CameraIntrinsics& k);

}  // namespace vpd
