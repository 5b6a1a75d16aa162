// uphdr: train / infer / eval / crop-patches for the unpaired multi-exposure
// HDR fusion network.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "uphdr/checkpoint.hpp"
#include "uphdr/evaluate.hpp"
#include "uphdr/image_io.hpp"
#include "uphdr/manifest.hpp"
#include "uphdr/patches.hpp"
#include "uphdr/radiometry.hpp"
#include "uphdr/trainer.hpp"

namespace {

using namespace uphdr;

nn::Generator<float> generator_from_checkpoint(const std::string& ckpt, TrainConfig& cfg_out) {
    auto meta = train::peek_checkpoint(ckpt);
    cfg_out = TrainConfig::from_toml(meta.config_toml);
    nn::GeneratorOptions gopt;
    gopt.res_blocks = cfg_out.res_blocks;
    gopt.shared_encoder = cfg_out.shared_encoder;
    gopt.transposed_upsample = (cfg_out.upsample == "transposed");
    std::mt19937_64 rng(0);
    nn::Generator<float> gen(gopt, rng);
    train::load_generator(ckpt, gen);
    return gen;
}

int cmd_infer(const std::string& ckpt, const std::vector<std::string>& inputs,
              const std::vector<double>& times, const std::string& out_dir) {
    if (inputs.size() != 3 || times.size() != 3)
        throw InvalidInputError("infer: need exactly 3 inputs and 3 exposure times");
    TrainConfig cfg;
    auto gen = generator_from_checkpoint(ckpt, cfg);

    ExposureStack stack;
    for (int i = 0; i < 3; ++i) {
        stack.exposures[i].image = io::load_ldr_image(inputs[i]);
        stack.exposures[i].exposure_time = times[i];
    }
    auto result = eval::infer(gen, stack, cfg.gamma, cfg.mu);

    std::filesystem::create_directories(out_dir);
    io::save_pfm(out_dir + "/output.pfm", result.radiance.image);
    io::save_png(out_dir + "/output_tm.png", result.tonemapped.image);
    std::cout << "wrote " << out_dir << "/output.pfm and output_tm.png ("
              << result.runtime_ms << " ms)\n";
    return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& manifest_path, const std::string& out_csv) {
    TrainConfig cfg;
    auto gen = generator_from_checkpoint(ckpt, cfg);
    auto manifest = data::load_manifest(manifest_path);

    auto infer_fn = [&](const ExposureStack& stack, const data::LdrSceneEntry&) {
        return eval::infer(gen, stack, cfg.gamma, cfg.mu).tonemapped;
    };
    auto records = eval::evaluate_manifest(manifest, infer_fn, cfg);
    if (records.empty()) std::cerr << "warning: no scenes with ground truth; empty table\n";

    const std::string csv = eval::eval_csv(records);
    if (!out_csv.empty()) {
        std::ofstream f(out_csv);
        f << csv;
    }
    std::cout << eval::eval_markdown(records);
    return 0;
}

int cmd_crop_patches(const std::string& manifest_path, int patch, int stride,
                     const std::string& out_dir, bool augment) {
    auto manifest = data::load_manifest(manifest_path);
    std::filesystem::create_directories(out_dir);
    size_t total = 0;
    auto emit = [&](const data::PatchRecord& rec, const std::string& tag, bool hdr) {
        char name[160];
        std::snprintf(name, sizeof(name), "%s_y%04d_x%04d_a%d", tag.c_str(), rec.top, rec.left,
                      rec.augmentation_id);
        const std::string base = out_dir + "/" + rec.scene_id + "_" + name;
        if (hdr)
            io::save_pfm(base + ".pfm", rec.pixels);
        else
            io::save_png(base + ".png", rec.pixels);
        ++total;
    };
    for (const auto& scene : manifest.ldr_scenes) {
        for (int e = 0; e < 3; ++e) {
            Image img = io::load_ldr_image(scene.paths[e]);
            for (const auto& rec : data::crop_patches(img, scene.id, patch, stride)) {
                if (augment) {
                    for (const auto& a : data::augment_dihedral(rec))
                        emit(a, "e" + std::to_string(e + 1), false);
                } else {
                    emit(rec, "e" + std::to_string(e + 1), false);
                }
            }
        }
    }
    int ti = 0;
    for (const auto& target : manifest.hdr_targets) {
        Image img = io::load_hdr_image(target);
        const std::string id = "target_" + std::to_string(ti++);
        for (const auto& rec : data::crop_patches(img, id, patch, stride)) emit(rec, "hdr", true);
    }
    std::cout << "wrote " << total << " patches to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unpaired multi-exposure HDR fusion"};
    app.require_subcommand(1);

    // train
    auto* tr = app.add_subcommand("train", "Run the training protocol");
    std::string config_path, manifest_path, out_dir = "run", resume_path, content_mode;
    bool no_min_patch = false, no_blur_set = false, force = false;
    long long seed = -1;
    int reference = 0;
    tr->add_option("--config", config_path, "TOML config (defaults used when omitted)");
    tr->add_option("--manifest", manifest_path, "dataset manifest JSON")->required();
    tr->add_option("--out", out_dir, "run directory");
    tr->add_option("--resume", resume_path, "checkpoint to resume from");
    tr->add_flag("--force", force, "resume even if the config hash differs");
    tr->add_flag("--no-min-patch", no_min_patch, "disable min-patch pooling (ablation)");
    tr->add_flag("--no-blur-set", no_blur_set, "disable the blurred fake set (ablation)");
    tr->add_option("--content", content_mode, "content loss: perceptual|mse");
    tr->add_option("--reference", reference, "reference exposure: 1|2|3");
    tr->add_option("--seed", seed, "RNG seed");

    // infer
    auto* in = app.add_subcommand("infer", "Fuse one exposure stack");
    std::string ckpt, infer_out = "out";
    std::vector<std::string> inputs;
    std::vector<double> times;
    in->add_option("--ckpt", ckpt, "checkpoint path")->required();
    in->add_option("--inputs", inputs, "three LDR images, increasing exposure")->expected(3);
    in->add_option("--times", times, "exposure times in seconds")->expected(3);
    in->add_option("--out", infer_out, "output directory");

    // eval
    auto* ev = app.add_subcommand("eval", "Tonemapped PSNR/SSIM over a test manifest");
    std::string eval_ckpt, eval_manifest, eval_csv = "results.csv";
    ev->add_option("--ckpt", eval_ckpt, "checkpoint path")->required();
    ev->add_option("--manifest", eval_manifest, "test manifest JSON")->required();
    ev->add_option("--out", eval_csv, "output CSV path");

    // crop-patches
    auto* cp = app.add_subcommand("crop-patches", "Materialize the training patch grid");
    std::string cp_manifest, cp_out = "patches";
    int cp_patch = 256, cp_stride = 64;
    bool cp_augment = false;
    cp->add_option("--manifest", cp_manifest, "dataset manifest JSON")->required();
    cp->add_option("--patch", cp_patch, "patch size");
    cp->add_option("--stride", cp_stride, "stride");
    cp->add_option("--out", cp_out, "output directory");
    cp->add_flag("--augment", cp_augment, "also write the 8 dihedral variants");

    CLI11_PARSE(app, argc, argv);

    try {
        if (tr->parsed()) {
            TrainConfig cfg =
                config_path.empty() ? TrainConfig{} : TrainConfig::from_toml_file(config_path);
            if (no_min_patch) cfg.min_patch = false;
            if (no_blur_set) cfg.blur_set = false;
            if (!content_mode.empty()) cfg.content = content_mode;
            if (reference) cfg.reference_index = reference;
            if (seed >= 0) cfg.seed = seed;
            cfg.validate();
            auto manifest = data::load_manifest(manifest_path);
            train::Trainer trainer(cfg, manifest, out_dir);
            if (!resume_path.empty()) trainer.resume(resume_path, force);
            std::cout << "final checkpoint: " << trainer.run() << "\n";
            return 0;
        }
        if (in->parsed()) return cmd_infer(ckpt, inputs, times, infer_out);
        if (ev->parsed()) return cmd_eval(eval_ckpt, eval_manifest, eval_csv);
        if (cp->parsed()) return cmd_crop_patches(cp_manifest, cp_patch, cp_stride, cp_out, cp_augment);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
