#include <algorithm>
#include <cmath>
#include <sstream>

#include "vpd/serialize.hpp"
#include "vpd/sphere.hpp"

namespace vpd {

namespace {

using nlohmann::json;

constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

json error_or_null(double e) {
    if (e == kMiss) return nullptr;
    return e;
}

}  // namespace

json detection_to_json(const Detection& det, const RunConfig& cfg) {
    json vps = json::array();
    for (const VanishingPoint& vp : det.vps) {
        SphericalCoord sph = vec_to_sph(vp.direction);
        vps.push_back({{"dir", {vp.direction.x, vp.direction.y, vp.direction.z}},
                       {"confidence", vp.confidence},
                       {"azimuth_deg", sph.azimuth * kRadToDeg},
                       {"elevation_deg", sph.elevation * kRadToDeg}});
    }
    json raw = json::array();
    for (const Vec3& d : det.raw_dirs) raw.push_back({d.x, d.y, d.z});

    json scales = json::array();
    for (const ScaleSpec& s : det.meta.scales)
        scales.push_back({{"delta_deg", s.delta_rad * kRadToDeg}, {"n", s.n_points}});

    return json{
        {"vps", vps},
        {"raw_dirs", raw},
        {"mode", to_string(det.mode)},
        {"focal_source", to_string(det.meta.focal_source)},
        {"scales", scales},
        {"grid_scale", det.meta.grid_scale},
        {"path", det.meta.path},
        {"lattice_n", det.meta.lattice_n},
        {"relaxed_triple", det.meta.relaxed_triple},
        {"synthesized_third", det.meta.synthesized_third},
        {"config", cfg.to_json()},
        {"config_hash", cfg.hash()},
    };
}

json report_to_json(const EvalReport& report, const RunConfig& cfg) {
    json images = json::array();
    for (const ImageResult& r : report.images) {
        json errs_gt = json::array();
        for (double e : r.errors_topk_gt) errs_gt.push_back(error_or_null(e));
        json errs_pred = json::array();
        for (double e : r.errors_topk_pred) errs_pred.push_back(error_or_null(e));
        json entry{{"index", r.index},
                   {"image", r.image},
                   {"n_gt", r.n_gt},
                   {"n_pred", r.n_pred},
                   {"errors_topk_gt", errs_gt},
                   {"errors_topk_pred", errs_pred}};
        if (!r.failure.empty()) entry["failure"] = r.failure;
        images.push_back(entry);
    }

    return json{
        {"counts",
         {{"images", report.n_images},
          {"failed", report.n_failed},
          {"gts", report.n_gts},
          {"preds", report.n_preds}}},
        {"aa",
         {{"thresholds_deg", report.thresholds_deg},
          {"fraction", report.aa_fraction},
          {"auc", report.aa_auc}}},
        {"recall_topk_gt",
         {{"auc", report.recall.auc}, {"tau_max_deg", report.recall.tau_deg.empty() ? 0.0 : report.recall.tau_deg.back()}}},
        {"recall_topk_pred",
         {{"auc", report.recall_by_pred.auc},
          {"tau_max_deg",
           report.recall_by_pred.tau_deg.empty() ? 0.0 : report.recall_by_pred.tau_deg.back()}}},
        {"images", images},
        {"config", cfg.to_json()},
        {"config_hash", cfg.hash()},
    };
}

std::string report_to_csv(const EvalReport& report) {
    // AA curves on the recall tau grid; tail rows carry recall only when the
    // configured AA thresholds are sparser than the grid.
    std::ostringstream out;
    out << "tau_deg,aa_fraction,aa_auc,recall\n";
    out.precision(10);

    // Recompute AA on the dense grid from the per-image errors.
    std::vector<double> pooled;
    for (const ImageResult& r : report.images)
        for (double e : r.errors_topk_gt) pooled.push_back(e);

    for (std::size_t i = 0; i < report.recall.tau_deg.size(); ++i) {
        double tau = report.recall.tau_deg[i];
        double frac = 0.0, auc = 0.0;
        if (!pooled.empty()) {
            std::size_t hit = 0;
            double area = 0.0;
            for (double e : pooled) {
                if (e <= tau) ++hit;
                if (e < tau) area += tau - e;
            }
            frac = static_cast<double>(hit) / pooled.size();
            auc = area / (tau * pooled.size());
        }
        out << tau << "," << frac << "," << auc << "," << report.recall.recall[i] << "\n";
    }
    return out.str();
}

RgbImage render_overlay(const GrayImage& img, const Detection& det, const HoughGrid& filtered,
                        const CameraIntrinsics& grid_camera, double grid_scale) {
    static const std::uint8_t palette[6][3] = {{230, 60, 60},  {60, 200, 80},  {70, 110, 240},
                                               {240, 200, 40}, {200, 70, 220}, {60, 210, 210}};
    RgbImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            auto v = static_cast<std::uint8_t>(std::clamp(img.at(x, y), 0.0f, 1.0f) * 255.0f);
            std::uint8_t* p = out.px(x, y);
            p[0] = p[1] = p[2] = v;
        }
    if (det.vps.empty()) return out;

    const HoughParams& params = filtered.params;
    const double inv_scale = 1.0 / grid_scale;
    const double grid_center = 0.5 * (params.grid_side - 1);
    const double incidence_tol = std::sin(0.05);  // ~3 degrees off the circle

    for (int k = 0; k < params.n_rho; ++k) {
        for (int j = 0; j < params.n_theta; ++j) {
            if (filtered.at(k, j) <= 0.0) continue;
            GridLine line = bin_to_line(k, j, params);
            Vec3 n = line_normal(line, params, grid_camera);

            int best = -1;
            double best_inc = incidence_tol;
            for (std::size_t v = 0; v < det.vps.size(); ++v) {
                double inc = std::abs(n.dot(det.vps[v].direction));
                if (inc < best_inc) {
                    best_inc = inc;
                    best = static_cast<int>(v);
                }
            }
            if (best < 0) continue;
            const std::uint8_t* color = palette[best % 6];

            // Trace the grid line back into source pixel coordinates.
            double c = std::cos(line.theta), s = std::sin(line.theta);
            double fx = line.rho * c + grid_center, fy = line.rho * s + grid_center;
            double dx = -s, dy = c;
            double span = params.grid_side * 1.5;
            for (double t = -span; t <= span; t += 0.5) {
                int px = static_cast<int>(std::lround((fx + t * dx) * inv_scale));
                int py = static_cast<int>(std::lround((fy + t * dy) * inv_scale));
                if (px < 0 || px >= out.width || py < 0 || py >= out.height) continue;
                std::uint8_t* p = out.px(px, py);
                p[0] = color[0];
                p[1] = color[1];
                p[2] = color[2];
            }
        }
    }
    return out;
}

}  // namespace vpd
