#pragma once

#include <string>

#include <json.hpp>

#include "vpd/detect.hpp"
#include "vpd/eval.hpp"

namespace vpd {

/// Fully resolved run configuration: built-in defaults overlaid by an
/// optional JSON config file, overlaid by command-line flags. The resolved
/// form is echoed into every output artifact.
struct RunConfig {
    DetectConfig detect;
    EvalConfig eval;

    /// Applies the keys present in a JSON config object on top of the
    /// current values; unknown keys are rejected.
    void apply_json(const nlohmann::json& j);

    /// Loads and applies a JSON config file.
    void apply_file(const std::string& path);

    /// Resolved configuration as JSON (the reproducibility echo).
    nlohmann::json to_json() const;

    /// Hash of the resolved configuration.
    std::uint64_t hash() const;
};

}  // namespace vpd
