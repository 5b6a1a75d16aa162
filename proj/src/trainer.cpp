#include "uphdr/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uphdr/image_io.hpp"
#include "uphdr/feature_bank.hpp"

namespace uphdr::train {

namespace {

constexpr double kAbortThreshold = 1e4;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Image tensor_to_image(const nn::Tensor<float>& t, int sample) {
    Image img(t.h, t.w, t.c);
    for (int y = 0; y < t.h; ++y)
        for (int x = 0; x < t.w; ++x)
            for (int c = 0; c < t.c; ++c) img.at(y, x, c) = t.at(sample, y, x, c);
    return img;
}

}  // namespace

nn::Tensor<float> tonemap_tensor(const nn::Tensor<float>& h, double mu) {
    nn::Tensor<float> out(h.n, h.h, h.w, h.c);
    const float denom = std::log1p(static_cast<float>(mu));
    for (size_t i = 0; i < h.size(); ++i)
        out.v[i] = std::log1p(static_cast<float>(mu) * h.v[i]) / denom;
    return out;
}

Trainer::Trainer(const TrainConfig& config, const data::DatasetManifest& manifest,
                 std::string run_dir)
    : cfg_(config), run_dir_(std::move(run_dir)), tonemap_(static_cast<float>(config.mu)) {
    cfg_.validate();

    std::mt19937_64 rng(static_cast<uint64_t>(cfg_.seed));
    nn::GeneratorOptions gopt;
    gopt.res_blocks = cfg_.res_blocks;
    gopt.shared_encoder = cfg_.shared_encoder;
    gopt.transposed_upsample = (cfg_.upsample == "transposed");
    gen_ = nn::Generator<float>(gopt, rng);
    disc_ = nn::Discriminator<float>(rng);
    features_ = make_feature_extractor(cfg_);
    opt_g_ = nn::Adam<float>(gen_.params(), cfg_.lr_g);
    opt_d_ = nn::Adam<float>(disc_.params(), cfg_.lr_d);
    std::ostringstream rs;
    rs << rng;
    rng_state_ = rs.str();

    sampler_ = std::make_unique<data::UnpairedSampler>(manifest, cfg_);

    if (!run_dir_.empty()) {
        std::filesystem::create_directories(run_dir_);
        std::filesystem::create_directories(run_dir_ + "/ckpt");
        std::filesystem::create_directories(run_dir_ + "/samples");
        std::ofstream cf(run_dir_ + "/config.resolved.toml");
        cf << cfg_.to_toml();
        log_path_ = run_dir_ + "/log.jsonl";
        std::ofstream lf(log_path_, std::ios::trunc);
        lf << "{\"event\":\"start\",\"config_hash\":\"" << cfg_.config_hash()
           << "\",\"features\":\"" << features_.id() << "\",\"features_sha256\":\""
           << features_.weights_sha256() << "\"}\n";
    }
}

void Trainer::log_line(const std::string& phase, const loss::LossReport& r) {
    if (log_path_.empty()) return;
    std::ofstream lf(log_path_, std::ios::app);
    lf << "{\"phase\":\"" << phase << "\",\"epoch\":" << r.epoch << ",\"step\":" << r.step
       << ",\"d_loss\":" << fmt(r.d_loss) << ",\"g_adv\":" << fmt(r.g_adv)
       << ",\"g_content\":" << fmt(r.g_content) << ",\"w_con\":" << fmt(r.w_con)
       << ",\"g_total\":" << fmt(r.g_total) << "}\n";
}

void Trainer::guard(const loss::LossReport& r) const {
    auto bad = [](double v) { return !std::isfinite(v) || std::abs(v) > kAbortThreshold; };
    if (bad(r.d_loss) || bad(r.g_adv) || bad(r.g_content)) {
        std::string diag = "training diverged at epoch " + std::to_string(r.epoch) + " step " +
                           std::to_string(r.step) + ": d_loss=" + fmt(r.d_loss) +
                           " g_adv=" + fmt(r.g_adv) + " g_content=" + fmt(r.g_content);
        if (!last_checkpoint_.empty()) diag += "; last good checkpoint: " + last_checkpoint_;
        throw DivergenceError(diag);
    }
}

double Trainer::init_step(const data::SampleBatch& batch) {
    gen_.zero_grad();
    auto h = gen_.forward(batch.branches, true);
    auto g_tm = tonemap_.forward(h, true);

    double value;
    nn::Tensor<float> dg;
    if (cfg_.content == "mse") {
        auto [v, grad] = loss::content_loss_mse_backward(g_tm, batch.reference);
        value = v;
        dg = std::move(grad);
    } else {
        auto [v, grad] = loss::content_loss_backward(features_, g_tm, batch.reference);
        value = v;
        dg = std::move(grad);
    }
    gen_.backward(tonemap_.backward(dg), true);
    opt_g_.step();
    return value;
}

double Trainer::step_discriminator(const data::SampleBatch& batch) {
    disc_.zero_grad();
    auto h = gen_.forward(batch.branches, true);
    auto g_tm = tonemap_tensor(h, cfg_.mu);  // constant w.r.t. this update
    const double d_loss = loss::discriminator_objective_backward(
        disc_, batch.hdr_targets, g_tm, cfg_.blur_set ? &batch.blur_targets : nullptr);
    opt_d_.step();
    return d_loss;
}

std::pair<double, double> Trainer::step_generator(const data::SampleBatch& batch, double w_con) {
    gen_.zero_grad();
    auto h = gen_.forward(batch.branches, true);
    auto g_tm = tonemap_.forward(h, true);

    const int window = cfg_.min_patch ? cfg_.min_patch_window : 0;
    auto [g_adv, dg_adv] =
        loss::generator_adversarial_backward(disc_, g_tm, window, /*update_d_params=*/false);

    double g_con;
    nn::Tensor<float> dg_con;
    if (cfg_.content == "mse") {
        auto [v, grad] = loss::content_loss_mse_backward(g_tm, batch.reference);
        g_con = v;
        dg_con = std::move(grad);
    } else {
        auto [v, grad] = loss::content_loss_backward(features_, g_tm, batch.reference);
        g_con = v;
        dg_con = std::move(grad);
    }

    const float w = static_cast<float>(w_con);
    for (size_t i = 0; i < dg_adv.size(); ++i) dg_adv.v[i] += w * dg_con.v[i];
    gen_.backward(tonemap_.backward(dg_adv), true);
    opt_g_.step();
    return {g_adv, g_con};
}

loss::LossReport Trainer::train_step(const data::SampleBatch& batch, int epoch, int step) {
    loss::LossReport r;
    r.epoch = epoch;
    r.step = step;
    r.w_con = loss::content_weight(epoch, cfg_.w0);
    r.d_loss = step_discriminator(batch);
    auto [g_adv, g_con] = step_generator(batch, r.w_con);
    r.g_adv = g_adv;
    r.g_content = g_con;
    guard(r);
    r.g_total = loss::total_generator_loss(r.g_adv, r.g_content, r.w_con);
    return r;
}

void Trainer::save(const std::string& path) const {
    CheckpointMeta meta;
    meta.epoch = epochs_done_;
    meta.step = global_step_;
    meta.config_hash = cfg_.config_hash();
    meta.config_toml = cfg_.to_toml();
    meta.rng_state = rng_state_;
    meta.features_sha256 = features_.weights_sha256();
    save_checkpoint(path, gen_, disc_, const_cast<nn::Adam<float>&>(opt_g_),
                    const_cast<nn::Adam<float>&>(opt_d_), meta);
}

void Trainer::resume(const std::string& path, bool force) {
    auto meta = load_checkpoint(path, gen_, disc_, opt_g_, opt_d_, cfg_.config_hash(), force);
    epochs_done_ = meta.epoch;
    global_step_ = meta.step;
    rng_state_ = meta.rng_state;
}

void Trainer::emit_samples(int epoch_tag) {
    if (run_dir_.empty()) return;
    char name[32];
    std::snprintf(name, sizeof(name), "epoch_%04d", epoch_tag);
    const std::string dir = run_dir_ + "/samples/" + name;
    std::filesystem::create_directories(dir);
    auto batch = sampler_->batch(0, 0, 1);
    auto h = gen_.forward(batch.branches, false);
    Image radiance = tensor_to_image(h, 0);
    io::save_pfm(dir + "/sample.pfm", radiance);
    io::save_png(dir + "/sample_tm.png", tensor_to_image(tonemap_tensor(h, cfg_.mu), 0));
}

std::string Trainer::run() {
    const int steps = sampler_->steps_per_epoch(cfg_.batch);
    const bool fresh = (epochs_done_ == 0 && global_step_ == 0);

    if (fresh) {
        for (int e = 0; e < cfg_.init_epochs; ++e) {
            for (int s = 0; s < steps; ++s) {
                auto batch = sampler_->batch(e, s, cfg_.batch);
                loss::LossReport r;
                r.epoch = e;
                r.step = s;
                r.w_con = cfg_.w0;
                r.g_content = init_step(batch);
                guard(r);
                r.g_total = loss::total_generator_loss(0.0, r.g_content, r.w_con);
                log_line("init", r);
                ++global_step_;
            }
        }
        if (cfg_.init_epochs > 0) emit_samples(0);
    }

    for (int e = epochs_done_; e < cfg_.epochs; ++e) {
        for (int s = 0; s < steps; ++s) {
            auto batch = sampler_->batch(cfg_.init_epochs + e, s, cfg_.batch);
            auto r = train_step(batch, e, s);
            log_line("adv", r);
            ++global_step_;
        }
        epochs_done_ = e + 1;
        if (epochs_done_ % cfg_.checkpoint_every == 0 || epochs_done_ == cfg_.epochs) {
            if (!run_dir_.empty()) {
                char name[32];
                std::snprintf(name, sizeof(name), "epoch_%04d.bin", epochs_done_);
                last_checkpoint_ = run_dir_ + "/ckpt/" + name;
                save(last_checkpoint_);
                emit_samples(epochs_done_);
            }
        }
    }

    if (last_checkpoint_.empty() && !run_dir_.empty()) {
        last_checkpoint_ = run_dir_ + "/ckpt/epoch_0000.bin";
        save(last_checkpoint_);
    }
    return last_checkpoint_;
}

std::string train(const TrainConfig& config, const data::DatasetManifest& manifest,
                  const std::string& run_dir) {
    Trainer t(config, manifest, run_dir);
    return t.run();
}

}  // namespace uphdr::train
