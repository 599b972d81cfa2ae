#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vpd/config.hpp"
#include "vpd/parallel.hpp"
#include "vpd/random.hpp"
#include "vpd/serialize.hpp"
#include "vpd/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNoEvidence = 3;
constexpr int kExitCache = 4;

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

struct CommonFlags {
    std::string config_file;
    std::string cache_dir;
    unsigned jobs = 0;
    int n_rho = 0, n_theta = 0, grid_side = 0;
    long long lattice_n = 0;
    int m_samples = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_file, "JSON config file");
    cmd->add_option("--cache-dir", flags.cache_dir, "Mapping cache directory");
    cmd->add_option("--jobs", flags.jobs, "Worker count (0 = all cores)");
    cmd->add_option("--n-rho", flags.n_rho, "Hough offset bins");
    cmd->add_option("--n-theta", flags.n_theta, "Hough angle bins");
    cmd->add_option("--grid-side", flags.grid_side, "Working grid side in pixels");
    cmd->add_option("--lattice-n", flags.lattice_n, "Hemisphere lattice size");
    cmd->add_option("--m-samples", flags.m_samples, "Azimuth samples per great circle");
}

// defaults <- config file <- flags <- VP_CACHE_DIR.
vpd::RunConfig resolve_config(const CommonFlags& flags) {
    vpd::RunConfig cfg;
    if (!flags.config_file.empty()) cfg.apply_file(flags.config_file);
    if (flags.jobs != 0) {
        cfg.detect.jobs = flags.jobs;
        cfg.eval.jobs = flags.jobs;
    }
    if (!flags.cache_dir.empty()) cfg.detect.cache_dir = flags.cache_dir;
    if (flags.n_rho > 0) cfg.detect.hough.n_rho = flags.n_rho;
    if (flags.n_theta > 0) cfg.detect.hough.n_theta = flags.n_theta;
    if (flags.grid_side > 0) cfg.detect.hough.grid_side = flags.grid_side;
    if (flags.lattice_n > 0) cfg.detect.lattice_n = static_cast<std::size_t>(flags.lattice_n);
    if (flags.m_samples > 0) cfg.detect.m_samples = static_cast<std::uint32_t>(flags.m_samples);
    if (const char* env = std::getenv("VP_CACHE_DIR"); env && *env) cfg.detect.cache_dir = env;
    cfg.detect.validate();
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw vpd::IoError(path + ": cannot open for writing");
    out << text;
}

// ---------------------------------------------------------------------------

int cmd_precompute(const CommonFlags& flags, double focal, int width, int height) {
    vpd::RunConfig cfg = resolve_config(flags);
    if (cfg.detect.cache_dir.empty())
        throw vpd::IoError("precompute: no cache directory (use --cache-dir or VP_CACHE_DIR)");

    vpd::CameraIntrinsics cam = vpd::CameraIntrinsics::centered(focal, width, height);
    double scale = static_cast<double>(cfg.detect.hough.grid_side) / std::max(width, height);
    vpd::CameraIntrinsics grid_cam =
        cam.scaled(scale, cfg.detect.hough.grid_side, cfg.detect.hough.grid_side);

    vpd::SphereLattice lattice =
        vpd::fibonacci_hemisphere(cfg.detect.lattice_n, cfg.detect.knn, cfg.detect.jobs);

    vpd::MappingTable probe;
    probe.hough_params = cfg.detect.hough;
    probe.lattice_id = lattice.content_hash();
    probe.intrinsics_id = vpd::intrinsics_hash(grid_cam);
    probe.m_samples = cfg.detect.m_samples;
    char name[64];
    std::snprintf(name, sizeof(name), "vpmt_%016llx.bin",
                  static_cast<unsigned long long>(probe.config_hash()));
    fs::path cache_file = fs::path(cfg.detect.cache_dir) / name;

    bool reused = false;
    vpd::MappingTable table;
    if (fs::exists(cache_file)) {
        table = vpd::load_mapping(cache_file.string(), cfg.detect.hough, probe.lattice_id,
                                  probe.intrinsics_id, probe.m_samples);
        reused = true;
    } else {
        table = vpd::build_mapping(cfg.detect.hough, lattice, grid_cam, cfg.detect.m_samples,
                                   cfg.detect.jobs);
        fs::create_directories(cache_file.parent_path());
        vpd::save_mapping(table, cache_file.string());
    }

    double covering = vpd::measure_covering_radius(lattice, cfg.detect.jobs);
    double eps_map = std::sin(covering) + 3.14159265358979323846 / cfg.detect.m_samples;

    std::size_t n_bins = cfg.detect.hough.bin_count();
    std::size_t total_entries = table.indices.size();
    std::size_t max_entries = 0, nonempty = 0;
    for (std::size_t i = 0; i < n_bins; ++i) {
        max_entries = std::max(max_entries, table.entry_count(i));
        if (table.entry_count(i) > 0) ++nonempty;
    }

    json out{{"cache_file", cache_file.string()},
             {"reused", reused},
             {"bins", n_bins},
             {"bins_with_entries", nonempty},
             {"entries_total", total_entries},
             {"entries_max", max_entries},
             {"entries_mean", nonempty ? static_cast<double>(total_entries) / nonempty : 0.0},
             {"lattice_covering_rad", covering},
             {"eps_map", eps_map},
             {"config", cfg.to_json()},
             {"config_hash", cfg.hash()}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_detect(const CommonFlags& flags, const std::string& image_path, double focal, double cx,
               double cy, const std::string& mode, bool fast, const std::string& out_path,
               const std::string& overlay_path, const std::string& hough_dump) {
    vpd::RunConfig cfg = resolve_config(flags);
    if (!mode.empty())
        cfg.detect.mode = mode == "multi" ? vpd::DetectMode::multi : vpd::DetectMode::manhattan;
    if (fast) cfg.detect.fast = true;

    vpd::GrayImage img = vpd::load_image(image_path);

    vpd::FocalSource src = vpd::FocalSource::flag;
    if (!(focal > 0.0)) {
        focal = static_cast<double>(std::max(img.width, img.height));
        src = vpd::FocalSource::defaulted;
        std::cerr << "warning: no --focal given; using uncalibrated default f = " << focal
                  << " (max image dimension)\n";
    }
    vpd::CameraIntrinsics cam(focal, cx >= 0.0 ? cx : 0.5 * img.width,
                              cy >= 0.0 ? cy : 0.5 * img.height, img.width, img.height);

    vpd::Detector detector(cfg.detect);
    vpd::PipelineArtifacts artifacts;
    vpd::Detection det = detector.detect(img, cam, src, &artifacts);

    write_text(out_path, vpd::detection_to_json(det, cfg).dump(2) + "\n");

    if (!overlay_path.empty()) {
        vpd::RgbImage overlay = vpd::render_overlay(img, det, artifacts.filtered,
                                                    artifacts.grid_camera, artifacts.resized.scale);
        vpd::save_ppm(overlay, overlay_path);
    }
    if (!hough_dump.empty()) vpd::save_pgm(vpd::hough_heatmap(artifacts.accumulated), hough_dump);
    return kExitOk;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    std::ifstream in(spec_path);
    if (!in) throw vpd::IoError(spec_path + ": cannot open");
    json spec_json;
    try {
        spec_json = json::parse(in);
    } catch (const json::exception& e) {
        throw vpd::FormatError(spec_path + ": " + std::string(e.what()));
    }

    const int count = spec_json.value("count", 1);
    if (count < 1) throw vpd::InvalidArgument("synth: count must be >= 1");
    const std::uint64_t base_seed = spec_json.value("seed", 0ull);
    const int width = spec_json.value("width", 512);
    const int height = spec_json.value("height", 512);
    const bool manhattan = spec_json.value("manhattan", true);
    const double focal = spec_json.value("focal", 2.1 * std::max(width, height));

    int dir_lo = 3, dir_hi = 3;
    if (spec_json.contains("n_directions")) {
        const json& nd = spec_json.at("n_directions");
        if (nd.is_array()) {
            dir_lo = nd.at(0).get<int>();
            dir_hi = nd.at(1).get<int>();
        } else {
            dir_lo = dir_hi = nd.get<int>();
        }
    }

    vpd::SceneSpec proto;
    proto.manhattan = manhattan;
    proto.lines_per_direction = spec_json.value("lines_per_direction", 8);
    proto.jitter_sigma = spec_json.value("jitter_sigma", 0.0);
    proto.outlier_fraction = spec_json.value("outlier_fraction", 0.0);
    proto.intrinsics = vpd::CameraIntrinsics::centered(focal, width, height);
    if (spec_json.value("raster", "aa") == std::string("binary"))
        proto.raster = vpd::RasterMode::binary;

    fs::create_directories(out_dir);
    std::ofstream manifest(fs::path(out_dir) / "manifest.jsonl", std::ios::binary);
    if (!manifest) throw vpd::IoError(out_dir + ": cannot write manifest");

    for (int i = 0; i < count; ++i) {
        vpd::SceneSpec spec = proto;
        spec.seed = base_seed + static_cast<std::uint64_t>(i);
        if (!manhattan && dir_hi > dir_lo) {
            vpd::Rng pick(spec.seed ^ 0x9e3779b97f4a7c15ull);
            spec.n_directions = pick.uniform_int(dir_lo, dir_hi);
        } else {
            spec.n_directions = manhattan ? 3 : dir_lo;
        }

        vpd::Scene scene = vpd::generate_scene(spec);
        char name[64];
        std::snprintf(name, sizeof(name), "scene_%05d.pgm", i);
        vpd::save_pgm(scene.image, (fs::path(out_dir) / name).string());

        json vps = json::array();
        for (const vpd::Vec3& d : scene.truth.directions) vps.push_back({d.x, d.y, d.z});
        json line{{"image", name},   {"focal", focal},          {"width", width},
                  {"height", height}, {"vps", vps},              {"manhattan", manhattan}};
        manifest << line.dump() << "\n";
    }
    std::cout << "wrote " << count << " scenes + manifest.jsonl to " << out_dir << "\n";
    return kExitOk;
}

int cmd_eval(const CommonFlags& flags, const std::string& manifest_path,
             const std::string& out_path, const std::string& csv_path,
             const std::vector<double>& thresholds, const std::string& mode) {
    vpd::RunConfig cfg = resolve_config(flags);
    if (!thresholds.empty()) cfg.eval.thresholds_deg = thresholds;
    if (!mode.empty())
        cfg.detect.mode = mode == "multi" ? vpd::DetectMode::multi : vpd::DetectMode::manhattan;

    std::vector<vpd::ManifestRecord> manifest = vpd::load_manifest(manifest_path);
    std::string base_dir = fs::path(manifest_path).parent_path().string();

    vpd::Detector detector(cfg.detect);
    vpd::EvalReport report = vpd::evaluate_manifest(manifest, base_dir, detector, cfg.eval);

    write_text(out_path, vpd::report_to_json(report, cfg).dump(2) + "\n");
    if (!csv_path.empty()) write_text(csv_path, vpd::report_to_csv(report));

    std::cerr << "evaluated " << report.n_images << " images (" << report.n_failed
              << " failed), recall AUC@" << cfg.eval.tau_max_deg << " = " << report.recall.auc
              << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const std::string& out_path, int scenes,
              std::uint64_t seed, double jitter, std::vector<int> theta_list,
              std::vector<long long> lattice_list) {
    vpd::RunConfig base = resolve_config(flags);
    if (theta_list.empty()) theta_list = {45, 90, 180};
    if (lattice_list.empty()) lattice_list = {8192, 16384, 32768};

    // Fixed seeded scene set shared by every configuration. Detection runs
    // in cluster-only (multi) mode so the sweep isolates the quantization of
    // the Hough grid and the lattice.
    std::vector<vpd::Scene> set;
    vpd::SceneSpec proto;
    proto.manhattan = true;
    proto.lines_per_direction = 8;
    proto.jitter_sigma = jitter;
    proto.intrinsics = vpd::CameraIntrinsics::centered(2.1 * 512, 512, 512);
    for (int i = 0; i < scenes; ++i) {
        vpd::SceneSpec spec = proto;
        spec.seed = seed + static_cast<std::uint64_t>(i);
        set.push_back(vpd::generate_scene(spec));
    }

    std::ostringstream csv;
    csv << "n_theta,n_points,aa3_fraction,aa3_auc,recall_auc10\n";
    csv.precision(10);

    for (int n_theta : theta_list) {
        for (long long n_points : lattice_list) {
            vpd::RunConfig cfg = base;
            cfg.detect.hough.n_theta = n_theta;
            cfg.detect.lattice_n = static_cast<std::size_t>(n_points);
            cfg.detect.mode = vpd::DetectMode::multi;
            vpd::Detector detector(cfg.detect);

            std::vector<std::vector<vpd::MatchEntry>> matches(set.size());
            vpd::parallel_for(set.size(), cfg.eval.jobs ? cfg.eval.jobs : vpd::default_jobs(),
                              [&](std::size_t i) {
                                  std::vector<vpd::VanishingPoint> preds;
                                  try {
                                      vpd::Detection det =
                                          detector.detect(set[i].image, proto.intrinsics);
                                      preds = det.vps;
                                  } catch (const vpd::Error&) {
                                  }
                                  matches[i] = vpd::match_bipartite(preds, set[i].truth.directions,
                                                                    vpd::TopK::by_gt());
                              });

            std::vector<double> errors;
            std::vector<vpd::MatchEntry> pooled;
            std::size_t n_gts = 0;
            for (std::size_t i = 0; i < set.size(); ++i) {
                n_gts += set[i].truth.directions.size();
                for (const vpd::MatchEntry& m : matches[i]) {
                    errors.push_back(m.error_deg);
                    pooled.push_back(m);
                }
            }
            double aa3f = vpd::angle_accuracy(errors, {3.0}, vpd::AccuracyMode::fraction)[0];
            double aa3a = vpd::angle_accuracy(errors, {3.0}, vpd::AccuracyMode::auc)[0];
            double auc = vpd::recall_auc(pooled, n_gts, 10.0).auc;
            csv << n_theta << "," << n_points << "," << aa3f << "," << aa3a << "," << auc << "\n";
            std::cerr << "sweep n_theta=" << n_theta << " n_points=" << n_points
                      << " AA@3=" << aa3f << "\n";
        }
    }
    write_text(out_path, csv.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vanishing point detection via Hough voting on the Gaussian hemisphere"};
    app.require_subcommand(1);

    CommonFlags flags;

    // precompute
    auto* pre = app.add_subcommand("precompute", "Build and cache the bin-to-sphere mapping");
    add_common(pre, flags);
    double pre_focal = 0.0;
    int pre_w = 512, pre_h = 512;
    pre->add_option("--focal", pre_focal, "Focal length in source pixels")->required();
    pre->add_option("--width", pre_w, "Source image width");
    pre->add_option("--height", pre_h, "Source image height");

    // detect
    auto* det = app.add_subcommand("detect", "Detect vanishing points in one image");
    add_common(det, flags);
    std::string det_image, det_mode, det_out, det_overlay, det_hough;
    double det_focal = 0.0, det_cx = -1.0, det_cy = -1.0;
    bool det_fast = false;
    det->add_option("image", det_image, "Input image (PGM/PPM/PNG)")->required();
    det->add_option("--focal", det_focal, "Focal length in pixels");
    det->add_option("--cx", det_cx, "Principal point x (default: center)");
    det->add_option("--cy", det_cy, "Principal point y (default: center)");
    det->add_option("--mode", det_mode, "manhattan | multi")
        ->check(CLI::IsMember({"manhattan", "multi"}));
    det->add_flag("--fast", det_fast, "Multiscale-only path (no dense lattice)");
    det->add_option("--out", det_out, "Output JSON path (default: stdout)");
    det->add_option("--overlay", det_overlay, "Write a PPM overlay of line assignments");
    det->add_option("--hough-dump", det_hough, "Write the Hough accumulator as a PGM heat map");

    // synth
    auto* syn = app.add_subcommand("synth", "Render a synthetic dataset with ground truth");
    std::string syn_spec, syn_out;
    syn->add_option("spec", syn_spec, "Scene spec JSON")->required();
    syn->add_option("--out", syn_out, "Output directory")->required();

    // eval
    auto* ev = app.add_subcommand("eval", "Evaluate a manifest of annotated images");
    add_common(ev, flags);
    std::string ev_manifest, ev_out, ev_csv, ev_mode;
    std::vector<double> ev_thresholds;
    ev->add_option("manifest", ev_manifest, "JSON-lines manifest")->required();
    ev->add_option("--out", ev_out, "Report JSON path (default: stdout)");
    ev->add_option("--csv", ev_csv, "Curve CSV path");
    ev->add_option("--thresholds", ev_thresholds, "AA thresholds in degrees")->delimiter(',');
    ev->add_option("--mode", ev_mode, "manhattan | multi")
        ->check(CLI::IsMember({"manhattan", "multi"}));

    // sweep
    auto* sw = app.add_subcommand("sweep", "Quantization sweep over n_theta and lattice size");
    add_common(sw, flags);
    std::string sw_out = "-";
    int sw_scenes = 200;
    std::uint64_t sw_seed = 20000;
    double sw_jitter = 1.0;
    std::vector<int> sw_thetas;
    std::vector<long long> sw_lattices;
    sw->add_option("--out", sw_out, "CSV output path (default: stdout)");
    sw->add_option("--scenes", sw_scenes, "Scene count for the fixed set");
    sw->add_option("--seed", sw_seed, "Base seed for the fixed set");
    sw->add_option("--jitter", sw_jitter, "Endpoint jitter sigma in pixels");
    sw->add_option("--n-theta-list", sw_thetas, "Angle bin counts")->delimiter(',');
    sw->add_option("--n-points-list", sw_lattices, "Lattice sizes")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (pre->parsed()) return cmd_precompute(flags, pre_focal, pre_w, pre_h);
        if (det->parsed())
            return cmd_detect(flags, det_image, det_focal, det_cx, det_cy, det_mode, det_fast,
                              det_out, det_overlay, det_hough);
        if (syn->parsed()) return cmd_synth(syn_spec, syn_out);
        if (ev->parsed())
            return cmd_eval(flags, ev_manifest, ev_out, ev_csv, ev_thresholds, ev_mode);
        if (sw->parsed())
            return cmd_sweep(flags, sw_out, sw_scenes, sw_seed, sw_jitter, sw_thetas, sw_lattices);
    } catch (const vpd::CacheMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCache;
    } catch (const vpd::CorruptCache& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCache;
    } catch (const vpd::NoEvidence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoEvidence;
    } catch (const vpd::InfeasibleSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoEvidence;
    } catch (const vpd::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const vpd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
