#pragma once

#include "uphdr/config.hpp"
#include "uphdr/features.hpp"

namespace uphdr {

/// Builds the configured frozen feature extractor. The "vgg19" preset
/// requires a converted weights archive; a missing file raises ConfigError
/// with instructions for producing one.
nn::FeatureExtractor<float> make_feature_extractor(const TrainConfig& config);

}  // namespace uphdr
