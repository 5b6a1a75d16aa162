#pragma once

#include <string>

namespace uphdr {

/// Every training hyperparameter, with the published defaults. Serialized
/// to/from a small TOML subset (flat sections, scalar values).
struct TrainConfig {
    // [train]
    int epochs = 200;
    int init_epochs = 10;
    double lr_g = 2.0e-4;
    double lr_d = 1.0e-4;
    int batch = 4;
    long long seed = 1;
    double w0 = 1.5;
    std::string content = "perceptual";  // "perceptual" | "mse"
    bool min_patch = true;
    bool blur_set = true;
    int reference_index = 2;  // 1 | 2 | 3
    int checkpoint_every = 10;

    // [model]
    int res_blocks = 6;
    bool shared_encoder = true;
    std::string upsample = "nearest";  // "nearest" | "transposed"
    int min_patch_window = 16;

    // [radiometry]
    double gamma = 2.2;
    double mu = 5000.0;
    double blur_sigma = 1.0;
    double normalize_percentile = 99.9;

    // [data]
    int resize_height = 256;
    int resize_width = 384;
    int patch = 256;
    int stride = 64;

    // [features]
    std::string features_preset = "tiny";  // "tiny" | "vgg19"
    std::string features_weights;          // archive path, required for vgg19

    // [eval]
    double psnr_cap = 99.0;

    void validate() const;

    /// Canonical serialization; also the input to config_hash().
    std::string to_toml() const;

    /// SHA-256 of the canonical serialization; stored in checkpoints so a
    /// resume with different settings is refused.
    std::string config_hash() const;

    static TrainConfig from_toml_file(const std::string& path);
    static TrainConfig from_toml(const std::string& text);
};

}  // namespace uphdr
