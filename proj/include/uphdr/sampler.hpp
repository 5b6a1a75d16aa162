#pragma once

#include <array>

#include "uphdr/config.hpp"
#include "uphdr/manifest.hpp"
#include "uphdr/nn/tensor.hpp"
#include "uphdr/patches.hpp"

namespace uphdr::data {

/// One training batch. Each branch tensor concatenates the raw exposure
/// with its radiance mapping (6 channels); targets and blur targets are
/// tonemapped and drawn from an index stream independent of the inputs.
struct SampleBatch {
    std::array<nn::Tensor<float>, 3> branches;  // [B,P,P,6] each
    nn::Tensor<float> reference;                // [B,P,P,3] raw reference-exposure crops
    nn::Tensor<float> hdr_targets;              // [B,P,P,3] tonemapped
    nn::Tensor<float> blur_targets;             // [B,P,P,3] blurred then tonemapped
};

/// Deterministic unpaired batch assembly. All images are loaded, resized
/// and radiometrically prepared once at construction; a batch is a pure
/// function of (seed, epoch, step), so prefetch workers could assemble
/// batches out of order.
class UnpairedSampler {
public:
    UnpairedSampler(const DatasetManifest& manifest, const TrainConfig& config);

    int steps_per_epoch(int batch_size) const;
    int patches_per_scene() const;

    SampleBatch batch(int epoch, int step, int batch_size) const;

private:
    struct Scene {
        std::array<Image, 3> exposures;   // resized, [0,1]
        std::array<Image, 3> radiance;    // gamma-mapped (unbounded above)
        std::string id;
    };
    struct Target {
        Image tonemapped;       // T(normalized radiance)
        Image blur_tonemapped;  // T(blur(normalized radiance))
    };
    struct Draw {
        int index;
        int top, left, aug;
    };

    std::vector<Draw> ldr_deck(int epoch) const;
    std::vector<Draw> hdr_deck(int epoch, size_t draws) const;

    TrainConfig cfg_;
    std::vector<Scene> scenes_;
    std::vector<Target> targets_;
    std::vector<PatchOffset> grid_;
};

/// Spec-level convenience: the batch at (epoch 0, step 0) for a fresh
/// sampler with the given seed.
SampleBatch sample_unpaired_batch(const DatasetManifest& manifest, const TrainConfig& config,
                                  long long rng_seed, int batch_size);

}  // namespace uphdr::data
