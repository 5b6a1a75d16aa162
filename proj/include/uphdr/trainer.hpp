#pragma once

#include <memory>
#include <string>

#include "uphdr/checkpoint.hpp"
#include "uphdr/config.hpp"
#include "uphdr/losses.hpp"
#include "uphdr/sampler.hpp"

namespace uphdr::train {

/// Owns the networks, optimizers and sampler and runs the training
/// protocol: a content-only initialization phase, then alternating
/// discriminator/generator updates with the decaying content weight.
/// All randomness derives from config.seed, so identical configs produce
/// bit-identical logs and checkpoints.
class Trainer {
public:
    Trainer(const TrainConfig& config, const data::DatasetManifest& manifest,
            std::string run_dir = "");

    /// Full protocol. Writes config.resolved.toml, log.jsonl, periodic
    /// checkpoints and sample emissions under the run directory. Returns
    /// the final checkpoint path.
    std::string run();

    /// One content-only generator update. Returns the content loss.
    double init_step(const data::SampleBatch& batch);

    /// One discriminator update (generator output treated as constant).
    double step_discriminator(const data::SampleBatch& batch);

    /// One generator update against the frozen discriminator.
    /// Returns (g_adv, g_content).
    std::pair<double, double> step_generator(const data::SampleBatch& batch, double w_con);

    /// D update then G update on the same batch, with divergence guards.
    loss::LossReport train_step(const data::SampleBatch& batch, int epoch, int step);

    void save(const std::string& path) const;
    void resume(const std::string& path, bool force = false);

    nn::Generator<float>& generator() { return gen_; }
    nn::Discriminator<float>& discriminator() { return disc_; }
    nn::FeatureExtractor<float>& features() { return features_; }
    data::UnpairedSampler& sampler() { return *sampler_; }
    const TrainConfig& config() const { return cfg_; }
    int epochs_done() const { return epochs_done_; }
    long long global_step() const { return global_step_; }

private:
    void emit_samples(int epoch_tag);
    void log_line(const std::string& phase, const loss::LossReport& r);
    void guard(const loss::LossReport& r) const;

    TrainConfig cfg_;
    std::string run_dir_;
    nn::Generator<float> gen_;
    nn::Discriminator<float> disc_;
    nn::FeatureExtractor<float> features_;
    nn::Adam<float> opt_g_, opt_d_;
    nn::MuLaw<float> tonemap_;
    std::unique_ptr<data::UnpairedSampler> sampler_;
    std::string rng_state_;
    int epochs_done_ = 0;       // adversarial epochs completed
    long long global_step_ = 0;
    std::string log_path_;
    std::string last_checkpoint_;
};

/// Spec-level entry point: train under `config` on `manifest`, writing the
/// run directory; returns the final checkpoint path.
std::string train(const TrainConfig& config, const data::DatasetManifest& manifest,
                  const std::string& run_dir);

/// Value-only mu-law on a tensor (no gradient bookkeeping).
nn::Tensor<float> tonemap_tensor(const nn::Tensor<float>& h, double mu);

}  // namespace uphdr::train
