#pragma once

#include <cstdint>
#include <string>

#include "uphdr/config.hpp"
#include "uphdr/manifest.hpp"

namespace toy {

/// Paths of a generated synthetic dataset: two training scenes plus
/// unpaired HDR targets, and one held-out scene with ground truth.
struct ToySet {
    std::string dir;
    std::string train_manifest;
    std::string test_manifest;
};

/// Builds the seeded synthetic dataset on disk: smooth random radiance
/// fields; each scene's three exposures are clipped gamma re-encodings of
/// its field, so the stack is radiometrically consistent.
ToySet make_toy_dataset(const std::string& dir, uint64_t seed = 7);

/// Desk-scale config matching the toy dataset geometry (128x160 images,
/// 64px patches, pooled score map 4x4).
uphdr::TrainConfig toy_config();

/// The 96x96-patch variant used by the initialization-phase criterion.
uphdr::TrainConfig toy_config_96();

}  // namespace toy
