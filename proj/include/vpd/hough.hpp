#pragma once

#include <cstdint>
#include <vector>

#include "vpd/error.hpp"
#include "vpd/image.hpp"

namespace vpd {

/// Polar-line discretization over a square working grid. Offsets cover
/// [-rho_max, rho_max] with rho_max = grid_side * sqrt(2) / 2 (the grid
/// half-diagonal); angles cover [0, pi).
struct HoughParams {
    int n_rho = 184;
    int n_theta = 180;
    int grid_side = 128;

    HoughParams() = default;
    HoughParams(int rho_bins, int theta_bins, int side)
        : n_rho(rho_bins), n_theta(theta_bins), grid_side(side) {
        validate();
    }

    void validate() const {
        if (n_rho < 3) throw InvalidArgument("hough: n_rho must be >= 3");
        if (n_theta < 2) throw InvalidArgument("hough: n_theta must be >= 2");
        if (grid_side < 2) throw InvalidArgument("hough: grid_side must be >= 2");
    }

    double rho_max() const { return grid_side * 0.7071067811865475244; }
    double rho_bin_width() const { return 2.0 * rho_max() / n_rho; }
    double theta_bin_width() const { return 3.14159265358979323846 / n_theta; }

    /// Center value of offset bin k.
    double rho_center(int k) const { return -rho_max() + (k + 0.5) * rho_bin_width(); }
    /// Center value of angle bin j.
    double theta_center(int j) const { return j * theta_bin_width(); }

    std::size_t bin_count() const { return static_cast<std::size_t>(n_rho) * n_theta; }
    std::size_t bin_index(int rho_idx, int theta_idx) const {
        return static_cast<std::size_t>(rho_idx) * n_theta + theta_idx;
    }

    bool operator==(const HoughParams& o) const {
        return n_rho == o.n_rho && n_theta == o.n_theta && grid_side == o.grid_side;
    }
};

/// Vote accumulator over (rho, theta) bins; row-major with theta fastest.
struct HoughGrid {
    HoughParams params;
    std::vector<double> votes;

    HoughGrid() = default;
    explicit HoughGrid(const HoughParams& p) : params(p), votes(p.bin_count(), 0.0) {}

    double& at(int rho_idx, int theta_idx) { return votes[params.bin_index(rho_idx, theta_idx)]; }
    double at(int rho_idx, int theta_idx) const { return votes[params.bin_index(rho_idx, theta_idx)]; }

    double total() const;
    double column_sum(int theta_idx) const;
};

/// Line in grid coordinates (origin at the grid center): the point set
/// {(x, y) : x cos(theta) + y sin(theta) = rho}.
struct GridLine {
    double rho = 0.0;
    double theta = 0.0;
};

/// Scatter voting: every pixel with positive value adds that value to the
/// nearest offset bin of its line through each angle. Per angle column the
/// column sum equals the total mass of the map.
HoughGrid hough_accumulate(const EdgeMap& feature, const HoughParams& params,
                           unsigned jobs = 0);

/// Keeps a bin only when it is the strict maximum among the offsets within
/// +/-(window-1)/2 in its angle column; everything else becomes zero. Equal
/// neighboring maxima suppress each other.
HoughGrid hough_filter(const HoughGrid& grid, int window = 9);

/// Greedy line extraction: repeatedly takes the accumulator's strongest bin,
/// claims the edge pixels within `erase_halfwidth` of its line, removes
/// their votes, and continues until no bin reaches `min_support` pixels of
/// edge mass. Removing a line's pixels kills its butterfly sidelobes and the
/// sinusoid ridges of line crossings outright, which per-bin filtering
/// cannot do; the result is a sparse grid holding one bin per detected line,
/// valued with the edge mass that line claimed.
HoughGrid hough_extract_lines(const EdgeMap& feature, const HoughParams& params,
                              double min_support, int max_lines = 64,
                              double erase_halfwidth = 2.0, unsigned jobs = 0);

/// Center-of-bin line parameters for a bin index pair.
GridLine bin_to_line(int rho_idx, int theta_idx, const HoughParams& params);

/// True when the bin's line intersects the grid's pixel-center square.
bool line_in_grid(const GridLine& line, const HoughParams& params);

/// Normalized vote heat map (row = rho, col = theta) for debugging.
GrayImage hough_heatmap(const HoughGrid& grid);

}  // namespace vpd
