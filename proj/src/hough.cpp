#include <algorithm>
#include <cmath>

#include "vpd/hough.hpp"
#include "vpd/parallel.hpp"

namespace vpd {

double HoughGrid::total() const {
    double s = 0.0;
    for (double v : votes) s += v;
    return s;
}

double HoughGrid::column_sum(int theta_idx) const {
    double s = 0.0;
    for (int k = 0; k < params.n_rho; ++k) s += at(k, theta_idx);
    return s;
}

HoughGrid hough_accumulate(const EdgeMap& feature, const HoughParams& params, unsigned jobs) {
    params.validate();
    if (feature.width != params.grid_side || feature.height != params.grid_side)
        throw DimensionMismatch("hough_accumulate: feature map is not grid_side x grid_side");
    if (jobs == 0) jobs = default_jobs();

    const int side = params.grid_side;
    const double center = 0.5 * (side - 1);
    const double rho_max = params.rho_max();
    const double inv_width = 1.0 / params.rho_bin_width();

    // Active pixels in centered coordinates.
    struct Px {
        double x, y;
        float v;
    };
    std::vector<Px> active;
    active.reserve(feature.values.size() / 8);
    for (int py = 0; py < side; ++py)
        for (int px = 0; px < side; ++px) {
            float v = feature.at(px, py);
            if (v > 0.0f) active.push_back({px - center, py - center, v});
        }

    HoughGrid grid(params);
    const int n_rho = params.n_rho;
    const int n_theta = params.n_theta;

    // Each worker owns whole theta columns, so the accumulation order inside
    // a column is fixed regardless of the thread count.
    parallel_chunks(static_cast<std::size_t>(n_theta), jobs,
                    [&](std::size_t, std::size_t jb, std::size_t je) {
                        for (std::size_t j = jb; j < je; ++j) {
                            double c = std::cos(params.theta_center(static_cast<int>(j)));
                            double s = std::sin(params.theta_center(static_cast<int>(j)));
                            for (const Px& p : active) {
                                double rho = p.x * c + p.y * s;
                                int k = static_cast<int>((rho + rho_max) * inv_width);
                                k = std::clamp(k, 0, n_rho - 1);
                                grid.votes[static_cast<std::size_t>(k) * n_theta + j] += p.v;
                            }
                        }
                    });
    return grid;
}

HoughGrid hough_filter(const HoughGrid& grid, int window) {
    if (window < 1 || window % 2 == 0) throw InvalidArgument("hough_filter: window must be odd and >= 1");
    const int half = (window - 1) / 2;
    const int n_rho = grid.params.n_rho;
    const int n_theta = grid.params.n_theta;

    HoughGrid out(grid.params);
    for (int j = 0; j < n_theta; ++j) {
        for (int k = 0; k < n_rho; ++k) {
            double v = grid.at(k, j);
            if (v <= 0.0) continue;
            bool strict_max = true;
            int lo = std::max(0, k - half), hi = std::min(n_rho - 1, k + half);
            for (int q = lo; q <= hi && strict_max; ++q) {
                if (q != k && grid.at(q, j) >= v) strict_max = false;
            }
            if (strict_max) out.at(k, j) = v;
        }
    }
    return out;
}

HoughGrid hough_extract_lines(const EdgeMap& feature, const HoughParams& params,
                              double min_support, int max_lines, double erase_halfwidth,
                              unsigned jobs) {
    params.validate();
    if (max_lines < 1) throw InvalidArgument("hough_extract_lines: max_lines must be >= 1");
    if (!(erase_halfwidth > 0.0))
        throw InvalidArgument("hough_extract_lines: erase_halfwidth must be > 0");

    HoughGrid acc = hough_accumulate(feature, params, jobs);

    const int side = params.grid_side;
    const double center = 0.5 * (side - 1);
    const double rho_max = params.rho_max();
    const double inv_width = 1.0 / params.rho_bin_width();
    const int n_theta = params.n_theta;

    struct Px {
        double x, y;
        float v;
        bool alive;
    };
    std::vector<Px> pixels;
    for (int py = 0; py < side; ++py)
        for (int px = 0; px < side; ++px) {
            float v = feature.at(px, py);
            if (v > 0.0f) pixels.push_back({px - center, py - center, v, true});
        }

    std::vector<double> cos_t(n_theta), sin_t(n_theta);
    for (int j = 0; j < n_theta; ++j) {
        cos_t[j] = std::cos(params.theta_center(j));
        sin_t[j] = std::sin(params.theta_center(j));
    }

    HoughGrid out(params);
    for (int iter = 0; iter < max_lines; ++iter) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < acc.votes.size(); ++i)
            if (acc.votes[i] > acc.votes[best]) best = i;
        if (acc.votes[best] < min_support) break;

        int k = static_cast<int>(best) / n_theta;
        int j = static_cast<int>(best) % n_theta;
        GridLine line = bin_to_line(k, j, params);
        double c = std::cos(line.theta), s = std::sin(line.theta);

        // Claim the corridor pixels: record their mass, withdraw their votes.
        double claimed = 0.0;
        for (Px& p : pixels) {
            if (!p.alive) continue;
            if (std::abs(p.x * c + p.y * s - line.rho) > erase_halfwidth) continue;
            p.alive = false;
            claimed += p.v;
            for (int jj = 0; jj < n_theta; ++jj) {
                double rho = p.x * cos_t[jj] + p.y * sin_t[jj];
                int kk = std::clamp(static_cast<int>((rho + rho_max) * inv_width), 0,
                                    params.n_rho - 1);
                acc.votes[static_cast<std::size_t>(kk) * n_theta + jj] -= p.v;
            }
        }
        if (claimed <= 0.0) break;  // numerical residue only
        out.at(k, j) += claimed;
    }
    return out;
}

GridLine bin_to_line(int rho_idx, int theta_idx, const HoughParams& params) {
    if (rho_idx < 0 || rho_idx >= params.n_rho || theta_idx < 0 || theta_idx >= params.n_theta)
        throw IndexOutOfRange("bin_to_line: bin index out of range");
    return {params.rho_center(rho_idx), params.theta_center(theta_idx)};
}

bool line_in_grid(const GridLine& line, const HoughParams& params) {
    // The line x cos t + y sin t = rho meets the square of pixel centers iff
    // |rho| does not exceed the square's support radius in direction t.
    double half = 0.5 * (params.grid_side - 1);
    double support = half * (std::abs(std::cos(line.theta)) + std::abs(std::sin(line.theta)));
    return std::abs(line.rho) <= support;
}

GrayImage hough_heatmap(const HoughGrid& grid) {
    GrayImage img(grid.params.n_theta, grid.params.n_rho);
    double max_v = 0.0;
    for (double v : grid.votes) max_v = std::max(max_v, v);
    if (max_v <= 0.0) return img;
    for (int k = 0; k < grid.params.n_rho; ++k)
        for (int j = 0; j < grid.params.n_theta; ++j)
            img.at(j, k) = static_cast<float>(grid.at(k, j) / max_v);
    return img;
}

}  // namespace vpd
