#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vpd/camera.hpp"
#include "vpd/detect.hpp"

namespace vpd {

/// Angle between two directions in camera space, antipodal aware, degrees
/// in [0, 90].
double angular_error_deg(const Vec3& pred, const Vec3& gt);

/// Ground truth for one image.
struct GroundTruth {
    std::vector<Vec3> vps;  // canonical
    CameraIntrinsics intrinsics;
};

/// Sentinel for an unmatched ground truth.
inline constexpr double kMiss = std::numeric_limits<double>::infinity();

struct MatchEntry {
    int pred = -1;  // -1 for a miss
    int gt = -1;
    double error_deg = kMiss;
};

struct TopK {
    enum class Rule { by_gt, by_pred, exact } rule = Rule::by_gt;
    int k = 0;  // used by Rule::exact

    static TopK by_gt() { return {Rule::by_gt, 0}; }
    static TopK by_pred() { return {Rule::by_pred, 0}; }
    static TopK exact(int k) { return {Rule::exact, k}; }
};

/// Minimum-total-angular-cost one-to-one assignment between the top-k
/// predictions (by confidence) and the ground truths; leftover ground truths
/// come back as misses. Optimal via the Hungarian algorithm.
std::vector<MatchEntry> match_bipartite(const std::vector<VanishingPoint>& preds,
                                        const std::vector<Vec3>& gts, TopK top_k);

/// Square-matrix Hungarian solver (exposed for testing); returns for each
/// row the assigned column of a minimum-cost perfect matching.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

enum class AccuracyMode { fraction, auc };

/// Angle accuracy at each threshold. fraction: share of errors <= tau
/// (misses count against). auc: area under the cumulative recall curve up to
/// tau, normalized by tau.
std::vector<double> angle_accuracy(const std::vector<double>& errors_deg,
                                   const std::vector<double>& thresholds_deg, AccuracyMode mode);

struct RecallCurve {
    std::vector<double> tau_deg;  // uniform grid, step 0.1 degrees
    std::vector<double> recall;
    double auc = 0.0;  // mean recall over the grid
};

/// Recall of ground truths vs angular threshold after matching, sampled on a
/// 0.1-degree grid up to tau_max.
RecallCurve recall_auc(const std::vector<MatchEntry>& matched, std::size_t total_gts,
                       double tau_max_deg);

// ---------------------------------------------------------------------------
// Manifest evaluation

/// One JSON-lines manifest record.
struct ManifestRecord {
    std::string image;
    double focal = 0.0;  // 0 means absent -> default policy
    std::optional<double> cx, cy;
    int width = 0;
    int height = 0;
    std::vector<Vec3> vps;
    bool manhattan = false;
};

/// Parses a JSON-lines manifest; throws ManifestError with line diagnostics.
std::vector<ManifestRecord> load_manifest(const std::string& path);

struct ImageResult {
    int index = 0;
    std::string image;
    int n_gt = 0;
    int n_pred = 0;
    std::vector<double> errors_topk_gt;    // one per ground truth (kMiss possible)
    std::vector<double> errors_topk_pred;  // multi mode only
    std::string failure;                   // nonempty when the image failed
};

struct EvalReport {
    std::vector<ImageResult> images;
    std::vector<double> thresholds_deg;
    std::vector<double> aa_fraction;
    std::vector<double> aa_auc;
    RecallCurve recall;           // top-k = #gt
    RecallCurve recall_by_pred;   // top-k = #pred (multi mode)
    std::size_t n_images = 0;
    std::size_t n_failed = 0;
    std::size_t n_gts = 0;
    std::size_t n_preds = 0;
};

struct EvalConfig {
    std::vector<double> thresholds_deg = {3.0, 5.0, 10.0};
    double tau_max_deg = 10.0;
    unsigned jobs = 0;
};

/// Runs the detector over every manifest record and aggregates the metrics.
/// Per-image failures are recorded (their ground truths count as misses)
/// rather than aborting the run.
EvalReport evaluate_manifest(const std::vector<ManifestRecord>& manifest,
                             const std::string& base_dir, const Detector& detector,
                             const EvalConfig& cfg);

}  // namespace vpd
