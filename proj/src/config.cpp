#include <cmath>
#include <fstream>

#include "vpd/config.hpp"

namespace vpd {

namespace {

using nlohmann::json;

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

void expect_object(const json& j, const char* where) {
    if (!j.is_object()) throw InvalidArgument(std::string("config: ") + where + " must be an object");
}

template <typename T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw InvalidArgument("config: unknown key '" + it.key() + "' in " + where);
    }
}

}  // namespace

void RunConfig::apply_json(const json& j) {
    expect_object(j, "root");
    check_keys(j, {"hough", "edges", "sphere", "cluster", "detect", "eval", "jobs", "cache_dir"},
               "root");

    if (j.contains("hough")) {
        const json& h = j.at("hough");
        expect_object(h, "hough");
        check_keys(h, {"n_rho", "n_theta", "grid_side", "filter_window", "min_line_support",
                       "max_lines"},
                   "hough");
        take(h, "n_rho", detect.hough.n_rho);
        take(h, "n_theta", detect.hough.n_theta);
        take(h, "grid_side", detect.hough.grid_side);
        take(h, "filter_window", detect.filter_window);
        take(h, "min_line_support", detect.min_line_support);
        take(h, "max_lines", detect.max_lines);
    }
    if (j.contains("edges")) {
        const json& e = j.at("edges");
        expect_object(e, "edges");
        check_keys(e, {"sigma", "low_quantile", "high_quantile"}, "edges");
        take(e, "sigma", detect.edges.sigma);
        take(e, "low_quantile", detect.edges.low_quantile);
        take(e, "high_quantile", detect.edges.high_quantile);
    }
    if (j.contains("sphere")) {
        const json& s = j.at("sphere");
        expect_object(s, "sphere");
        check_keys(s, {"n_points", "knn", "m_samples"}, "sphere");
        take(s, "n_points", detect.lattice_n);
        take(s, "knn", detect.knn);
        take(s, "m_samples", detect.m_samples);
    }
    if (j.contains("cluster")) {
        const json& c = j.at("cluster");
        expect_object(c, "cluster");
        check_keys(c, {"eps", "min_points", "min_circles", "merge_radius_deg", "score_quantile"},
                   "cluster");
        take(c, "eps", detect.cluster.eps);
        take(c, "min_points", detect.cluster.min_points);
        take(c, "min_circles", detect.min_circles);
        if (c.contains("merge_radius_deg"))
            detect.cluster.merge_radius = c.at("merge_radius_deg").get<double>() * kDegToRad;
        take(c, "score_quantile", detect.score_quantile);
    }
    if (j.contains("detect")) {
        const json& d = j.at("detect");
        expect_object(d, "detect");
        check_keys(d,
                   {"mode", "smooth_rounds", "background_n", "ortho_tol_deg", "shortlist", "fast",
                    "snap_orthogonal", "use_multiscale", "scales"},
                   "detect");
        if (d.contains("mode")) {
            std::string mode = d.at("mode").get<std::string>();
            if (mode == "manhattan")
                detect.mode = DetectMode::manhattan;
            else if (mode == "multi")
                detect.mode = DetectMode::multi;
            else
                throw InvalidArgument("config: mode must be 'manhattan' or 'multi'");
        }
        take(d, "smooth_rounds", detect.smooth_rounds);
        take(d, "background_n", detect.background_n);
        if (d.contains("ortho_tol_deg"))
            detect.ortho_tol_rad = d.at("ortho_tol_deg").get<double>() * kDegToRad;
        take(d, "shortlist", detect.shortlist);
        take(d, "fast", detect.fast);
        take(d, "snap_orthogonal", detect.snap_orthogonal);
        take(d, "use_multiscale", detect.use_multiscale);
        if (d.contains("scales")) {
            detect.scales.clear();
            for (const json& s : d.at("scales")) {
                expect_object(s, "scale entry");
                check_keys(s, {"delta_deg", "n"}, "scale entry");
                detect.scales.push_back(
                    {s.at("delta_deg").get<double>() * kDegToRad, s.at("n").get<int>()});
            }
        }
    }
    if (j.contains("eval")) {
        const json& e = j.at("eval");
        expect_object(e, "eval");
        check_keys(e, {"thresholds_deg", "tau_max_deg"}, "eval");
        take(e, "thresholds_deg", eval.thresholds_deg);
        take(e, "tau_max_deg", eval.tau_max_deg);
    }
    if (j.contains("jobs")) {
        unsigned jobs = j.at("jobs").get<unsigned>();
        detect.jobs = jobs;
        eval.jobs = jobs;
    }
    take(j, "cache_dir", detect.cache_dir);
}

void RunConfig::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open config file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    apply_json(j);
}

nlohmann::json RunConfig::to_json() const {
    json scales = json::array();
    for (const ScaleSpec& s : detect.scales)
        scales.push_back({{"delta_deg", s.delta_rad / kDegToRad}, {"n", s.n_points}});
    return json{
        {"hough",
         {{"n_rho", detect.hough.n_rho},
          {"n_theta", detect.hough.n_theta},
          {"grid_side", detect.hough.grid_side},
          {"filter_window", detect.filter_window},
          {"min_line_support", detect.min_line_support},
          {"max_lines", detect.max_lines}}},
        {"edges",
         {{"sigma", detect.edges.sigma},
          {"low_quantile", detect.edges.low_quantile},
          {"high_quantile", detect.edges.high_quantile}}},
        {"sphere",
         {{"n_points", detect.lattice_n}, {"knn", detect.knn}, {"m_samples", detect.m_samples}}},
        {"cluster",
         {{"eps", detect.cluster.eps},
          {"min_points", detect.cluster.min_points},
          {"min_circles", detect.min_circles},
          {"merge_radius_deg", detect.cluster.merge_radius_rad() / kDegToRad},
          {"score_quantile", detect.score_quantile}}},
        {"detect",
         {{"mode", to_string(detect.mode)},
          {"smooth_rounds", detect.smooth_rounds},
          {"background_n", detect.background_n},
          {"ortho_tol_deg", detect.ortho_tol_rad / kDegToRad},
          {"shortlist", detect.shortlist},
          {"fast", detect.fast},
          {"snap_orthogonal", detect.snap_orthogonal},
          {"use_multiscale", detect.use_multiscale},
          {"scales", scales}}},
        {"eval", {{"thresholds_deg", eval.thresholds_deg}, {"tau_max_deg", eval.tau_max_deg}}},
        {"jobs", detect.jobs},
        {"cache_dir", detect.cache_dir},
    };
}

std::uint64_t RunConfig::hash() const {
    std::string dump = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace vpd
