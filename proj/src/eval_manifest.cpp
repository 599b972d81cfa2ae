#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "vpd/eval.hpp"
#include "vpd/image.hpp"
#include "vpd/parallel.hpp"

namespace vpd {

namespace {

using nlohmann::json;

Vec3 parse_vp(const json& j, int line_no) {
    if (!j.is_array() || j.size() != 3)
        throw ManifestError("manifest line " + std::to_string(line_no) +
                            ": vps entries must be [x, y, z]");
    Vec3 v{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    double n = v.norm();
    if (n < 1e-9)
        throw ManifestError("manifest line " + std::to_string(line_no) + ": zero vp vector");
    return canonicalize(v * (1.0 / n));
}

}  // namespace

std::vector<ManifestRecord> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open");

    std::vector<ManifestRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ManifestError("manifest line " + std::to_string(line_no) + ": " + e.what());
        }

        ManifestRecord rec;
        try {
            if (!j.contains("image")) throw ManifestError("missing field 'image'");
            if (!j.contains("vps")) throw ManifestError("missing field 'vps'");
            if (!j.contains("width") || !j.contains("height"))
                throw ManifestError("missing field 'width'/'height'");
            rec.image = j["image"].get<std::string>();
            rec.width = j["width"].get<int>();
            rec.height = j["height"].get<int>();
            if (rec.width <= 0 || rec.height <= 0) throw ManifestError("nonpositive image size");
            if (j.contains("focal")) rec.focal = j["focal"].get<double>();
            if (j.contains("cx")) rec.cx = j["cx"].get<double>();
            if (j.contains("cy")) rec.cy = j["cy"].get<double>();
            rec.manhattan = j.value("manhattan", false);
            for (const auto& vj : j["vps"]) rec.vps.push_back(parse_vp(vj, line_no));
        } catch (const ManifestError& e) {
            throw ManifestError("manifest line " + std::to_string(line_no) + ": " + e.what());
        } catch (const json::exception& e) {
            throw ManifestError("manifest line " + std::to_string(line_no) + ": " + e.what());
        }

        if (rec.manhattan) {
            if (rec.vps.size() != 3)
                throw ManifestError("manifest line " + std::to_string(line_no) +
                                    ": manhattan record needs exactly 3 vps");
            for (int a = 0; a < 3; ++a)
                for (int b = a + 1; b < 3; ++b) {
                    double dev = std::abs(90.0 - angular_error_deg(rec.vps[a], rec.vps[b]));
                    if (dev > 0.5)
                        throw ManifestError("manifest line " + std::to_string(line_no) +
                                            ": manhattan vps not orthogonal (dev " +
                                            std::to_string(dev) + " deg)");
                }
        } else if (rec.vps.empty() || rec.vps.size() > 8) {
            throw ManifestError("manifest line " + std::to_string(line_no) +
                                ": expected 1..8 vps, got " + std::to_string(rec.vps.size()));
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw ManifestError(path + ": manifest has no records");
    return records;
}

EvalReport evaluate_manifest(const std::vector<ManifestRecord>& manifest,
                             const std::string& base_dir, const Detector& detector,
                             const EvalConfig& cfg) {
    if (manifest.empty()) throw ManifestError("evaluate_manifest: empty manifest");
    unsigned jobs = cfg.jobs == 0 ? default_jobs() : cfg.jobs;

    EvalReport report;
    report.thresholds_deg = cfg.thresholds_deg;
    report.images.resize(manifest.size());

    struct PerImage {
        std::vector<MatchEntry> by_gt;
        std::vector<MatchEntry> by_pred;
    };
    std::vector<PerImage> matches(manifest.size());

    parallel_for(manifest.size(), jobs, [&](std::size_t i) {
        const ManifestRecord& rec = manifest[i];
        ImageResult& res = report.images[i];
        res.index = static_cast<int>(i);
        res.image = rec.image;
        res.n_gt = static_cast<int>(rec.vps.size());

        std::vector<VanishingPoint> preds;
        try {
            std::filesystem::path p(rec.image);
            if (p.is_relative() && !base_dir.empty())
                p = std::filesystem::path(base_dir) / p;
            GrayImage img = load_image(p.string());

            double focal = rec.focal;
            FocalSource src = FocalSource::manifest;
            if (!(focal > 0.0)) {
                focal = static_cast<double>(std::max(rec.width, rec.height));
                src = FocalSource::defaulted;
            }
            CameraIntrinsics cam(focal, rec.cx.value_or(0.5 * rec.width),
                                 rec.cy.value_or(0.5 * rec.height), rec.width, rec.height);

            Detection det = detector.detect(img, cam, src);
            preds = det.vps;
        } catch (const Error& e) {
            res.failure = e.what();
        }

        res.n_pred = static_cast<int>(preds.size());
        matches[i].by_gt = match_bipartite(preds, rec.vps, TopK::by_gt());
        matches[i].by_pred = match_bipartite(preds, rec.vps, TopK::by_pred());
        for (const MatchEntry& m : matches[i].by_gt) res.errors_topk_gt.push_back(m.error_deg);
        for (const MatchEntry& m : matches[i].by_pred)
            res.errors_topk_pred.push_back(m.error_deg);
    });

    std::vector<double> pooled;
    std::vector<MatchEntry> pooled_by_gt, pooled_by_pred;
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        report.n_gts += manifest[i].vps.size();
        report.n_preds += static_cast<std::size_t>(report.images[i].n_pred);
        if (!report.images[i].failure.empty()) ++report.n_failed;
        for (const MatchEntry& m : matches[i].by_gt) {
            pooled.push_back(m.error_deg);
            pooled_by_gt.push_back(m);
        }
        for (const MatchEntry& m : matches[i].by_pred) pooled_by_pred.push_back(m);
    }
    report.n_images = manifest.size();

    if (!pooled.empty()) {
        report.aa_fraction = angle_accuracy(pooled, cfg.thresholds_deg, AccuracyMode::fraction);
        report.aa_auc = angle_accuracy(pooled, cfg.thresholds_deg, AccuracyMode::auc);
    }
    report.recall = recall_auc(pooled_by_gt, report.n_gts, cfg.tau_max_deg);
    report.recall_by_pred = recall_auc(pooled_by_pred, report.n_gts, cfg.tau_max_deg);
    return report;
}

}  // namespace vpd
