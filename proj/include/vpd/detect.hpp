#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vpd/edges.hpp"
#include "vpd/mapping.hpp"
#include "vpd/sphere.hpp"

namespace vpd {

struct VanishingPoint {
    Vec3 direction;           // canonical unit vector
    double confidence = 0.0;  // accumulated evidence, >= 0
};

enum class DetectMode { manhattan, multi };

enum class FocalSource { manifest, flag, defaulted };

const char* to_string(DetectMode m);
const char* to_string(FocalSource s);

/// DBSCAN settings. eps is a cosine distance 1 - |p.q| (antipodal aware);
/// merge_radius keeps emitted vanishing points apart.
struct ClusterConfig {
    double eps = 0.005;
    int min_points = 4;
    double merge_radius = 0.0;  // radians; 0 means acos(1 - eps)

    double merge_radius_rad() const;
    void validate() const {
        if (!(eps > 0.0)) throw InvalidArgument("cluster: eps must be > 0");
        if (min_points < 1) throw InvalidArgument("cluster: min_points must be >= 1");
    }
};

/// One coarse-to-fine sampling stage: cap radius and point count.
struct ScaleSpec {
    double delta_rad = 0.0;
    int n_points = 0;
};

/// A delta this large is treated as covering the hemisphere (anchor-free).
inline constexpr double kHemisphereDelta = 1.39626340159546366;  // 80 degrees

struct DetectConfig {
    HoughParams hough;
    int filter_window = 9;
    double min_line_support = 4.0;  // minimum edge mass for an extracted line
    int max_lines = 64;             // extraction budget per image
    EdgeConfig edges;

    std::size_t lattice_n = 32768;
    int knn = 16;
    std::uint32_t m_samples = 1024;

    ClusterConfig cluster;
    double score_quantile = 0.98;
    int smooth_rounds = 2;
    std::size_t background_n = 0;  // coarse background lattice (0 = off)
    std::uint32_t min_circles = 2;   // distinct circles required at a candidate

    DetectMode mode = DetectMode::manhattan;
    double ortho_tol_rad = 0.0349065850398865915;  // 2 degrees
    int shortlist = 12;
    std::vector<ScaleSpec> scales = {{1.57079632679489662, 512},
                                     {0.226892802759262841, 128},
                                     {0.0698131700797731831, 128}};
    bool use_multiscale = true;
    bool fast = false;  // multiscale-only path, no dense accumulation
    bool snap_orthogonal = true;

    unsigned jobs = 0;
    std::string cache_dir;  // optional mapping-cache directory

    void validate() const;
};

struct DetectionMeta {
    std::size_t lattice_n = 0;
    std::vector<ScaleSpec> scales;
    FocalSource focal_source = FocalSource::flag;
    double grid_scale = 1.0;
    std::string path;  // "dense" or "multiscale"
    bool relaxed_triple = false;
    bool synthesized_third = false;
    int empty_patches = 0;
};

struct Detection {
    std::vector<VanishingPoint> vps;  // descending confidence
    std::vector<Vec3> raw_dirs;       // pre-snap directions (manhattan mode)
    DetectMode mode = DetectMode::manhattan;
    DetectionMeta meta;
};

// ---------------------------------------------------------------------------
// Field operations

struct SmoothStats {
    double max_relative_drift = 0.0;  // mass drift before renormalization
};

/// Mean filter over {self} + k neighbors, renormalized to the input mass
/// each round. The raw drift caused by uneven in-degrees is reported.
SphereField smooth_field(const SphereField& field, int rounds, SmoothStats* stats = nullptr);

/// Local-contrast residual: subtracts a slowly varying background estimated
/// on a coarse companion lattice (cell means, then a smoothing round) and
/// clamps at zero. Circle voting under a narrow field of view piles a broad
/// density bump around the optical axis that can dwarf the narrow
/// vanishing-point peaks; the residual keeps peaks and drops the bump.
SphereField subtract_background(const SphereField& field, std::size_t coarse_n,
                                unsigned jobs = 0);

/// DBSCAN over the points whose score exceeds the given quantile of the
/// field; each cluster contributes its highest-scoring point. Results are
/// sorted by descending confidence and thinned to the merge radius. When a
/// per-point contributing-circle count is supplied, points crossed by fewer
/// than `min_circles` distinct circles do not participate: a vanishing point
/// is an intersection of several great circles, while a lone strong circle
/// carries blob-level values along its whole arc.
std::vector<VanishingPoint> cluster_field(const SphereField& field, const ClusterConfig& cfg,
                                          double score_quantile,
                                          const std::vector<std::uint32_t>* counts = nullptr,
                                          std::uint32_t min_circles = 0);

struct TripleResult {
    std::array<VanishingPoint, 3> vps;  // descending confidence
    bool relaxed = false;               // greedy fallback used
    bool synthesized = false;           // third direction is a cross product
};

/// Best orthogonal triple among the top candidates by exhaustive search;
/// falls back to a greedy near-orthogonal pick (flagged) when no triple
/// meets the tolerance.
TripleResult select_manhattan_triple(const std::vector<VanishingPoint>& candidates,
                                     double ortho_tol_rad, int shortlist = 12);

struct RefineResult {
    std::array<VanishingPoint, 3> vps;
    std::vector<Vec3> raw_dirs;  // before orthogonal snapping
    int empty_patches = 0;
    double finest_patch_covering = 0.0;  // radians
};

/// Coarse-to-fine local re-voting around each anchor. Hemisphere-covering
/// scales bootstrap anchors from a global sampling when none are supplied
/// and are skipped otherwise (a denser stage already produced the anchors).
/// Each local stage snaps the surviving Hough bins' great circles onto a cap
/// patch and moves the anchor to the patch maximum.
RefineResult refine_multiscale(std::optional<std::array<VanishingPoint, 3>> anchors,
                               const HoughGrid& filtered, const CameraIntrinsics& grid_camera,
                               std::span<const ScaleSpec> scales, const DetectConfig& cfg);

/// Covering radius of the cap patch used at a given scale (rotation
/// invariant, so measured once at the pole).
double measure_cap_covering(double delta_rad, int n_points);

/// Snaps three near-orthogonal directions to the nearest orthonormal frame.
std::array<Vec3, 3> snap_orthonormal(const std::array<Vec3, 3>& dirs);

// ---------------------------------------------------------------------------
// Pipeline

/// Intermediate pipeline products, for overlays and debug dumps.
struct PipelineArtifacts {
    ResizedImage resized;
    CameraIntrinsics grid_camera;
    HoughGrid accumulated;
    HoughGrid filtered;
};

/// Owns the lattice and a cache of mapping tables (keyed by intrinsics) so
/// repeated detections stay cheap. Immutable configuration; safe to share
/// across threads.
class Detector {
public:
    explicit Detector(DetectConfig cfg);

    const DetectConfig& config() const { return cfg_; }
    const SphereLattice& lattice() const { return lattice_; }

    /// Full pipeline on an already-loaded image.
    Detection detect(const GrayImage& img, const CameraIntrinsics& camera,
                     FocalSource focal_source = FocalSource::flag,
                     PipelineArtifacts* artifacts = nullptr) const;

    /// Mapping table for a grid-scaled camera (built or loaded on demand).
    std::shared_ptr<const MappingTable> table_for(const CameraIntrinsics& grid_camera) const;

private:
    DetectConfig cfg_;
    SphereLattice lattice_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::uint64_t, std::shared_ptr<const MappingTable>> tables_;
};

/// One-shot convenience wrapper around Detector.
Detection detect_vps(const GrayImage& img, const CameraIntrinsics& camera,
                     const DetectConfig& cfg, FocalSource focal_source = FocalSource::flag);

}  // namespace vpd
