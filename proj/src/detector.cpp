#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "vpd/detect.hpp"
#include "vpd/parallel.hpp"

namespace vpd {

Detector::Detector(DetectConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    unsigned jobs = cfg_.jobs == 0 ? default_jobs() : cfg_.jobs;
    if (!cfg_.fast) lattice_ = fibonacci_hemisphere(cfg_.lattice_n, cfg_.knn, jobs);
}

std::shared_ptr<const MappingTable> Detector::table_for(const CameraIntrinsics& grid_camera) const {
    const std::uint64_t intr_id = intrinsics_hash(grid_camera);

    std::lock_guard<std::mutex> lock(mutex_);
    auto it = tables_.find(intr_id);
    if (it != tables_.end()) return it->second;

    unsigned jobs = cfg_.jobs == 0 ? default_jobs() : cfg_.jobs;
    std::shared_ptr<const MappingTable> table;

    std::filesystem::path cache_file;
    if (!cfg_.cache_dir.empty()) {
        MappingTable probe;
        probe.hough_params = cfg_.hough;
        probe.lattice_id = lattice_.content_hash();
        probe.intrinsics_id = intr_id;
        probe.m_samples = cfg_.m_samples;
        char name[64];
        std::snprintf(name, sizeof(name), "vpmt_%016llx.bin",
                      static_cast<unsigned long long>(probe.config_hash()));
        cache_file = std::filesystem::path(cfg_.cache_dir) / name;
        if (std::filesystem::exists(cache_file)) {
            try {
                table = std::make_shared<MappingTable>(
                    load_mapping(cache_file.string(), cfg_.hough, lattice_.content_hash(),
                                 intr_id, cfg_.m_samples));
            } catch (const Error&) {
                table.reset();  // stale or damaged; rebuild below
            }
        }
    }

    if (!table) {
        table = std::make_shared<MappingTable>(
            build_mapping(cfg_.hough, lattice_, grid_camera, cfg_.m_samples, jobs));
        if (!cache_file.empty()) {
            std::filesystem::create_directories(cache_file.parent_path());
            save_mapping(*table, cache_file.string());
        }
    }

    tables_.emplace(intr_id, table);
    return table;
}

Detection Detector::detect(const GrayImage& img, const CameraIntrinsics& camera,
                           FocalSource focal_source, PipelineArtifacts* artifacts) const {
    unsigned jobs = cfg_.jobs == 0 ? default_jobs() : cfg_.jobs;

    ResizedImage resized = resize_to_grid(img, cfg_.hough.grid_side);
    CameraIntrinsics grid_camera =
        camera.scaled(resized.scale, cfg_.hough.grid_side, cfg_.hough.grid_side);

    EdgeMap edges = detect_edges(resized.image, cfg_.edges);
    HoughGrid grid = hough_accumulate(edges, cfg_.hough, jobs);
    // Greedy extraction subsumes the per-column filter for the pipeline: its
    // output is a sparse subset of accumulator bins, one per claimed line.
    HoughGrid filtered =
        hough_extract_lines(edges, cfg_.hough, cfg_.min_line_support, cfg_.max_lines, 2.0, jobs);
    if (artifacts) {
        artifacts->resized = resized;
        artifacts->grid_camera = grid_camera;
        artifacts->accumulated = grid;
        artifacts->filtered = filtered;
    }
    if (filtered.total() <= 0.0) throw NoEvidence("detect: filtered Hough grid is empty");

    Detection detection;
    detection.mode = cfg_.mode;
    detection.meta.lattice_n = cfg_.fast ? 0 : lattice_.size();
    detection.meta.scales = cfg_.scales;
    detection.meta.focal_source = focal_source;
    detection.meta.grid_scale = resized.scale;

    if (cfg_.fast) {
        if (cfg_.mode != DetectMode::manhattan)
            throw InvalidArgument("detect: fast path requires manhattan mode");
        RefineResult refined =
            refine_multiscale(std::nullopt, filtered, grid_camera, cfg_.scales, cfg_);
        detection.vps.assign(refined.vps.begin(), refined.vps.end());
        detection.raw_dirs = refined.raw_dirs;
        detection.meta.path = "multiscale";
        detection.meta.empty_patches = refined.empty_patches;
        return detection;
    }

    std::shared_ptr<const MappingTable> table = table_for(grid_camera);
    std::vector<std::uint32_t> counts;
    SphereField field = accumulate_field_column_mean(filtered, *table, lattice_, jobs, &counts);
    field = smooth_field(field, cfg_.smooth_rounds);
    field = subtract_background(field, cfg_.background_n, jobs);
    std::vector<VanishingPoint> candidates =
        cluster_field(field, cfg_.cluster, cfg_.score_quantile, &counts, cfg_.min_circles);

    detection.meta.path = "dense";
    if (cfg_.mode == DetectMode::multi) {
        detection.vps = std::move(candidates);
        return detection;
    }

    TripleResult triple = select_manhattan_triple(candidates, cfg_.ortho_tol_rad, cfg_.shortlist);
    detection.meta.relaxed_triple = triple.relaxed;
    detection.meta.synthesized_third = triple.synthesized;

    if (cfg_.use_multiscale && !cfg_.scales.empty()) {
        RefineResult refined =
            refine_multiscale(triple.vps, filtered, grid_camera, cfg_.scales, cfg_);
        detection.vps.assign(refined.vps.begin(), refined.vps.end());
        detection.raw_dirs = refined.raw_dirs;
        detection.meta.empty_patches = refined.empty_patches;
    } else {
        std::array<VanishingPoint, 3> vps = triple.vps;
        detection.raw_dirs = {vps[0].direction, vps[1].direction, vps[2].direction};
        if (cfg_.snap_orthogonal) {
            std::array<Vec3, 3> snapped =
                snap_orthonormal({vps[0].direction, vps[1].direction, vps[2].direction});
            for (int i = 0; i < 3; ++i) vps[i].direction = snapped[i];
        }
        detection.vps.assign(vps.begin(), vps.end());
    }
    return detection;
}

Detection detect_vps(const GrayImage& img, const CameraIntrinsics& camera,
                     const DetectConfig& cfg, FocalSource focal_source) {
    Detector detector(cfg);
    return detector.detect(img, camera, focal_source);
}

}  // namespace vpd
