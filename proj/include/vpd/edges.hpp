#pragma once

#include "vpd/image.hpp"

namespace vpd {

/// Canny front-end settings. Thresholds are quantiles of the gradient
/// magnitude distribution, which makes the detector invariant to affine
/// intensity changes of the input.
struct EdgeConfig {
    double sigma = 1.4;      // Gaussian pre-smoothing, pixels
    double low_quantile = 0.7;
    double high_quantile = 0.9;

    void validate() const {
        if (sigma < 0.0) throw InvalidArgument("edges: sigma must be >= 0");
        if (!(low_quantile >= 0.0 && low_quantile <= high_quantile && high_quantile <= 1.0))
            throw InvalidArgument("edges: need 0 <= low <= high <= 1");
    }
};

/// Gradient magnitude + non-maximum suppression along the gradient +
/// double-threshold hysteresis. Surviving pixels carry their gradient
/// magnitude normalized by the image maximum; everything else is zero.
EdgeMap detect_edges(const GrayImage& img, const EdgeConfig& cfg = {});

}  // namespace vpd
