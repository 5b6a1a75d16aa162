#include "support/toy_dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "uphdr/image.hpp"
#include "uphdr/image_io.hpp"

namespace toy {

namespace {

using uphdr::Image;

constexpr int kH = 128, kW = 160;
constexpr double kTimes[3] = {0.25, 1.0, 4.0};
constexpr double kGamma = 2.2;

/// Smooth positive radiance field: gradient + random Gaussian blobs,
/// per-channel tinted.
Image make_radiance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Image img(kH, kW, 3);
    const int blobs = 6;
    struct Blob {
        double cy, cx, sigma, amp;
        double tint[3];
    };
    std::vector<Blob> bs(blobs);
    for (auto& b : bs) {
        b.cy = u(rng) * kH;
        b.cx = u(rng) * kW;
        b.sigma = 8.0 + 32.0 * u(rng);
        b.amp = 0.3 + 1.7 * u(rng);
        for (double& t : b.tint) t = 0.4 + 0.6 * u(rng);
    }
    const double gdir = u(rng) * 2 * M_PI, gamp = 0.15 + 0.2 * u(rng);
    for (int y = 0; y < kH; ++y)
        for (int x = 0; x < kW; ++x) {
            const double g =
                gamp * (0.5 + 0.5 * std::sin((x * std::cos(gdir) + y * std::sin(gdir)) / 40.0));
            for (int c = 0; c < 3; ++c) {
                double v = 0.04 + g;
                for (const auto& b : bs) {
                    const double d2 = (y - b.cy) * (y - b.cy) + (x - b.cx) * (x - b.cx);
                    v += b.amp * b.tint[c] * std::exp(-d2 / (2 * b.sigma * b.sigma));
                }
                img.at(y, x, c) = v;
            }
        }
    return img;
}

Image exposure_of(const Image& radiance, double t) {
    Image out(kH, kW, 3);
    for (size_t i = 0; i < radiance.size(); ++i)
        out.data[i] = std::min(std::pow(std::min(radiance.data[i] * t, 1.0), 1.0 / kGamma), 1.0);
    return out;
}

void write_scene(const std::string& dir, const std::string& name, const Image& radiance,
                 bool with_gt) {
    for (int i = 0; i < 3; ++i)
        uphdr::io::save_png16(dir + "/" + name + "_e" + std::to_string(i + 1) + ".png",
                              exposure_of(radiance, kTimes[i]));
    if (with_gt) uphdr::io::save_pfm(dir + "/" + name + "_gt.pfm", radiance);
}

}  // namespace

ToySet make_toy_dataset(const std::string& dir, uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::mt19937_64 rng(seed);

    // training scenes (LDR domain)
    Image ra = make_radiance(rng), rb = make_radiance(rng);
    write_scene(dir, "sceneA", ra, false);
    write_scene(dir, "sceneB", rb, false);

    // unpaired HDR targets (different fields, arbitrary absolute scale)
    for (int i = 0; i < 3; ++i) {
        Image rt = make_radiance(rng);
        for (double& v : rt.data) v *= 3.0;
        uphdr::io::save_pfm(dir + "/target" + std::to_string(i) + ".pfm", rt);
    }

    // held-out paired scene
    Image rf = make_radiance(rng);
    write_scene(dir, "heldout", rf, true);

    auto scene_json = [&](const std::string& name, bool gt) {
        std::string s = "    {\"id\": \"" + name + "\", \"paths\": [\"" + name + "_e1.png\", \"" +
                        name + "_e2.png\", \"" + name + "_e3.png\"], \"exposure_times\": [0.25, 1.0, 4.0]";
        if (gt) s += ", \"gt\": \"" + name + "_gt.pfm\"";
        return s + "}";
    };

    ToySet set;
    set.dir = dir;
    set.train_manifest = dir + "/train.json";
    set.test_manifest = dir + "/test.json";
    {
        std::ofstream f(set.train_manifest);
        f << "{\n  \"split\": \"train\",\n  \"ldr_scenes\": [\n"
          << scene_json("sceneA", false) << ",\n"
          << scene_json("sceneB", false) << "\n  ],\n"
          << "  \"hdr_targets\": [\"target0.pfm\", \"target1.pfm\", \"target2.pfm\"]\n}\n";
    }
    {
        std::ofstream f(set.test_manifest);
        f << "{\n  \"split\": \"test\",\n  \"ldr_scenes\": [\n"
          << scene_json("heldout", true) << "\n  ],\n  \"hdr_targets\": []\n}\n";
    }
    return set;
}

uphdr::TrainConfig toy_config() {
    uphdr::TrainConfig cfg;
    cfg.resize_height = kH;
    cfg.resize_width = kW;
    cfg.patch = 64;
    cfg.stride = 32;
    cfg.batch = 1;
    cfg.min_patch_window = 4;  // 16x16 score map pools to 4x4
    cfg.res_blocks = 3;
    cfg.epochs = 2;
    cfg.init_epochs = 1;
    cfg.checkpoint_every = 1;
    cfg.seed = 11;
    return cfg;
}

uphdr::TrainConfig toy_config_96() {
    uphdr::TrainConfig cfg = toy_config();
    cfg.patch = 96;
    cfg.stride = 32;
    cfg.min_patch_window = 6;  // 24x24 score map pools to 4x4
    return cfg;
}

}  // namespace toy
