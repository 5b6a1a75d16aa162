#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uphdr/config.hpp"
#include "uphdr/image.hpp"
#include "uphdr/manifest.hpp"
#include "uphdr/networks.hpp"

namespace uphdr::eval {

struct EvalRecord {
    std::string scene_id;
    double psnr_tm = 0.0;
    double ssim_tm = 0.0;
    double runtime_ms = 0.0;
};

struct InferResult {
    HdrImage radiance;
    TonemappedImage tonemapped;
    double runtime_ms = 0.0;
};

/// Runs the generator on a full exposure stack. Sides not divisible by 4
/// are reflect-padded (right/bottom) and the output cropped back. Uses
/// frozen batch-norm statistics, so repeated calls are identical.
InferResult infer(nn::Generator<float>& gen, const ExposureStack& stack, double gamma, double mu);

/// A pluggable inference hook: scene -> tonemapped output (test seams use
/// stubs, the CLI uses the generator).
using InferFn = std::function<TonemappedImage(const ExposureStack&, const data::LdrSceneEntry&)>;

/// Per-scene tonemapped PSNR/SSIM against the ground-truth HDR. Scenes
/// without ground truth are skipped with a warning. Records are in
/// manifest order.
std::vector<EvalRecord> evaluate_manifest(const data::DatasetManifest& manifest, InferFn infer_fn,
                                          const TrainConfig& cfg);

/// CSV with reserved columns for externally computed metrics, plus a mean
/// row; returns the csv text.
std::string eval_csv(const std::vector<EvalRecord>& records);
std::string eval_markdown(const std::vector<EvalRecord>& records);

ExposureStack load_stack(const data::LdrSceneEntry& scene);

}  // namespace uphdr::eval
