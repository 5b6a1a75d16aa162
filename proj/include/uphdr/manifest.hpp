#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace uphdr::data {

/// One bracketed scene: three exposures ordered by strictly increasing
/// exposure time, optionally paired with a ground-truth HDR (test split).
struct LdrSceneEntry {
    std::string id;
    std::array<std::string, 3> paths;
    std::array<double, 3> exposure_times;
    std::optional<std::string> ground_truth;
};

/// Unpaired dataset description: the LDR-scene list and the HDR-target list
/// are independent collections.
struct DatasetManifest {
    std::vector<LdrSceneEntry> ldr_scenes;
    std::vector<std::string> hdr_targets;
    std::string split = "train";
};

/// Loads and validates a manifest JSON. Every referenced file must exist
/// and decode; violations name the offending scene or path.
DatasetManifest load_manifest(const std::string& path);

}  // namespace uphdr::data
