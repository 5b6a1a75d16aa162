#include "uphdr/evaluate.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "uphdr/image_io.hpp"
#include "uphdr/metrics.hpp"
#include "uphdr/radiometry.hpp"

namespace uphdr::eval {

namespace {

// Reflect-pads right/bottom so both sides are divisible by 4.
Image pad_to_multiple4(const Image& src) {
    const int ph = (4 - src.height % 4) % 4, pw = (4 - src.width % 4) % 4;
    if (!ph && !pw) return src;
    Image out(src.height + ph, src.width + pw, src.channels);
    for (int y = 0; y < out.height; ++y) {
        const int sy = y < src.height ? y : 2 * src.height - 2 - y;
        for (int x = 0; x < out.width; ++x) {
            const int sx = x < src.width ? x : 2 * src.width - 2 - x;
            for (int c = 0; c < src.channels; ++c) out.at(y, x, c) = src.at(sy, sx, c);
        }
    }
    return out;
}

nn::Tensor<float> to_tensor(const Image& a, const Image& b) {
    nn::Tensor<float> t(1, a.height, a.width, 6);
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x)
            for (int c = 0; c < 3; ++c) {
                t.at(0, y, x, c) = static_cast<float>(a.at(y, x, c));
                t.at(0, y, x, 3 + c) = static_cast<float>(b.at(y, x, c));
            }
    return t;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

ExposureStack load_stack(const data::LdrSceneEntry& scene) {
    ExposureStack st;
    for (int i = 0; i < 3; ++i) {
        st.exposures[i].image = io::load_ldr_image(scene.paths[i]);
        st.exposures[i].exposure_time = scene.exposure_times[i];
    }
    return st;
}

InferResult infer(nn::Generator<float>& gen, const ExposureStack& stack, double gamma, double mu) {
    const auto t0 = std::chrono::steady_clock::now();
    const int h = stack.exposures[0].image.height, w = stack.exposures[0].image.width;
    for (const auto& e : stack.exposures)
        if (e.image.height != h || e.image.width != w)
            throw InvalidInputError("infer: exposures must share dimensions");

    std::array<nn::Tensor<float>, 3> branches;
    for (int i = 0; i < 3; ++i) {
        Image x = pad_to_multiple4(stack.exposures[i].image);
        LdrImage padded{x, stack.exposures[i].exposure_time};
        Image hm = radiometry::gamma_map(padded, gamma).image;
        branches[i] = to_tensor(x, hm);
    }

    auto out = gen.forward(branches, /*train=*/false);

    InferResult r;
    r.radiance.image = Image(h, w, 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) r.radiance.image.at(y, x, c) = out.at(0, y, x, c);
    r.tonemapped = radiometry::mu_law_tonemap(r.radiance, mu);
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<EvalRecord> evaluate_manifest(const data::DatasetManifest& manifest, InferFn infer_fn,
                                          const TrainConfig& cfg) {
    std::vector<EvalRecord> out;
    for (const auto& scene : manifest.ldr_scenes) {
        if (!scene.ground_truth) {
            std::cerr << "warning: scene " << scene.id << " has no ground truth; skipped\n";
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        ExposureStack stack = load_stack(scene);
        TonemappedImage got = infer_fn(stack, scene);

        Image raw = io::load_hdr_image(*scene.ground_truth);
        HdrImage gt = radiometry::normalize_hdr(raw, cfg.normalize_percentile);
        TonemappedImage gt_tm = radiometry::mu_law_tonemap(gt, cfg.mu);

        EvalRecord r;
        r.scene_id = scene.id;
        r.psnr_tm = psnr(got.image, gt_tm.image, cfg.psnr_cap);
        r.ssim_tm = ssim(got.image, gt_tm.image);
        r.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

std::string eval_csv(const std::vector<EvalRecord>& records) {
    std::ostringstream o;
    o << "scene,psnr_tm,ssim_tm,hdrvdp,tmqi,runtime_ms\n";
    double ps = 0, ss = 0, rt = 0;
    for (const auto& r : records) {
        o << r.scene_id << "," << num(r.psnr_tm) << "," << num(r.ssim_tm) << ",,,"
          << num(r.runtime_ms) << "\n";
        ps += r.psnr_tm;
        ss += r.ssim_tm;
        rt += r.runtime_ms;
    }
    if (!records.empty()) {
        const double n = static_cast<double>(records.size());
        o << "mean," << num(ps / n) << "," << num(ss / n) << ",,," << num(rt / n) << "\n";
    }
    return o.str();
}

std::string eval_markdown(const std::vector<EvalRecord>& records) {
    std::ostringstream o;
    o << "| scene | psnr_tm | ssim_tm | runtime_ms |\n";
    o << "|---|---|---|---|\n";
    double ps = 0, ss = 0, rt = 0;
    for (const auto& r : records) {
        o << "| " << r.scene_id << " | " << num(r.psnr_tm) << " | " << num(r.ssim_tm) << " | "
          << num(r.runtime_ms) << " |\n";
        ps += r.psnr_tm;
        ss += r.ssim_tm;
        rt += r.runtime_ms;
    }
    if (!records.empty()) {
        const double n = static_cast<double>(records.size());
        o << "| **mean** | " << num(ps / n) << " | " << num(ss / n) << " | " << num(rt / n)
          << " |\n";
    }
    return o.str();
}

}  // namespace uphdr::eval
