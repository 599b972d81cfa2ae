#pragma once

#include <string>

#include <json.hpp>

#include "vpd/config.hpp"
#include "vpd/detect.hpp"
#include "vpd/eval.hpp"

namespace vpd {

/// Detection as a JSON document: ranked vps with spherical coordinates,
/// mode, focal source, scales, and the resolved config echo.
nlohmann::json detection_to_json(const Detection& det, const RunConfig& cfg);

/// Evaluation report as a JSON document (aggregates + per-image entries).
nlohmann::json report_to_json(const EvalReport& report, const RunConfig& cfg);

/// Plot-ready CSV with one row per tau sample:
/// tau_deg,aa_fraction,aa_auc,recall.
std::string report_to_csv(const EvalReport& report);

/// Renders the input image with the filtered Hough bins' lines colored by
/// their nearest vanishing point (by great-circle incidence).
RgbImage render_overlay(const GrayImage& img, const Detection& det, const HoughGrid& filtered,
                        const CameraIntrinsics& grid_camera, double grid_scale);

}  // namespace vpd
