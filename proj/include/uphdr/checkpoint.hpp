#pragma once

#include <string>

#include "uphdr/networks.hpp"
#include "uphdr/nn/adam.hpp"

namespace uphdr::train {

struct CheckpointMeta {
    int epoch = 0;           // adversarial epochs completed
    long long step = 0;      // global step counter
    std::string config_hash;
    std::string config_toml;  // full resolved config, for standalone loads
    std::string rng_state;
    std::string features_sha256;
};

/// Writes every parameter, batch-norm buffer and optimizer moment to an
/// integrity-checked archive. Atomic (temp + rename).
void save_checkpoint(const std::string& path, const nn::Generator<float>& gen,
                     const nn::Discriminator<float>& disc, nn::Adam<float>& opt_g,
                     nn::Adam<float>& opt_d, const CheckpointMeta& meta);

/// Restores all state saved by save_checkpoint. The stored config hash must
/// match `expected_config_hash` unless `force`.
CheckpointMeta load_checkpoint(const std::string& path, nn::Generator<float>& gen,
                               nn::Discriminator<float>& disc, nn::Adam<float>& opt_g,
                               nn::Adam<float>& opt_d, const std::string& expected_config_hash,
                               bool force = false);

/// Reads only the metadata block (to recover the stored config).
CheckpointMeta peek_checkpoint(const std::string& path);

/// Restores generator parameters and buffers for inference.
CheckpointMeta load_generator(const std::string& path, nn::Generator<float>& gen);

}  // namespace uphdr::train
