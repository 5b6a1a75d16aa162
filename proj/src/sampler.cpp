#include "uphdr/sampler.hpp"

#include <algorithm>
#include <random>

#include "uphdr/image_io.hpp"
#include "uphdr/image_ops.hpp"
#include "uphdr/radiometry.hpp"

namespace uphdr::data {

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t stream, uint64_t epoch) {
    // splitmix64 over the packed identifiers
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1) + 0xbf58476d1ce4e5b9ull * (epoch + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

void write_patch(nn::Tensor<float>& dst, int sample, const Image& src, int ch_offset) {
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x)
            for (int c = 0; c < src.channels; ++c)
                dst.at(sample, y, x, ch_offset + c) = static_cast<float>(src.at(y, x, c));
}

}  // namespace

UnpairedSampler::UnpairedSampler(const DatasetManifest& manifest, const TrainConfig& config)
    : cfg_(config) {
    cfg_.validate();
    if (manifest.ldr_scenes.empty())
        throw ConfigError("sampler: LDR domain is empty");
    if (manifest.hdr_targets.empty())
        throw ConfigError("sampler: HDR target domain is empty");

    for (const auto& sc : manifest.ldr_scenes) {
        Scene s;
        s.id = sc.id;
        for (int i = 0; i < 3; ++i) {
            LdrImage ldr;
            ldr.image = resize_bilinear(io::load_ldr_image(sc.paths[i]), cfg_.resize_height,
                                        cfg_.resize_width);
            ldr.exposure_time = sc.exposure_times[i];
            s.exposures[i] = ldr.image;
            s.radiance[i] = radiometry::gamma_map(ldr, cfg_.gamma).image;
        }
        scenes_.push_back(std::move(s));
    }

    for (const auto& tp : manifest.hdr_targets) {
        Image raw = resize_bilinear(io::load_hdr_image(tp), cfg_.resize_height, cfg_.resize_width);
        HdrImage norm = radiometry::normalize_hdr(raw, cfg_.normalize_percentile);
        Target t;
        t.tonemapped = radiometry::mu_law_tonemap(norm, cfg_.mu).image;
        // blur target cached once per (file, sigma)
        HdrImage blurred = radiometry::make_blur_target(norm, cfg_.blur_sigma);
        t.blur_tonemapped = radiometry::mu_law_tonemap(blurred, cfg_.mu).image;
        targets_.push_back(std::move(t));
    }

    grid_ = patch_grid(cfg_.resize_height, cfg_.resize_width, cfg_.patch, cfg_.stride);
    if (grid_.empty())
        throw ConfigError("sampler: resized images are smaller than the patch size");
}

int UnpairedSampler::patches_per_scene() const { return static_cast<int>(grid_.size()); }

int UnpairedSampler::steps_per_epoch(int batch_size) const {
    const size_t deck = scenes_.size() * grid_.size();
    return static_cast<int>((deck + batch_size - 1) / batch_size);
}

std::vector<UnpairedSampler::Draw> UnpairedSampler::ldr_deck(int epoch) const {
    std::vector<Draw> deck;
    deck.reserve(scenes_.size() * grid_.size());
    for (size_t s = 0; s < scenes_.size(); ++s)
        for (const auto& g : grid_) deck.push_back({static_cast<int>(s), g.top, g.left, 0});
    std::mt19937_64 rng(mix_seed(cfg_.seed, 0xA, epoch));
    std::shuffle(deck.begin(), deck.end(), rng);
    std::uniform_int_distribution<int> aug(0, 7);
    for (auto& d : deck) d.aug = aug(rng);
    return deck;
}

std::vector<UnpairedSampler::Draw> UnpairedSampler::hdr_deck(int epoch, size_t draws) const {
    std::mt19937_64 rng(mix_seed(cfg_.seed, 0xB, epoch));
    std::uniform_int_distribution<int> aug(0, 7);
    std::uniform_int_distribution<size_t> cell(0, grid_.size() - 1);
    std::vector<int> order(targets_.size());
    std::vector<Draw> deck;
    deck.reserve(draws);
    while (deck.size() < draws) {
        // balanced: reshuffle the full target list each pass
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::shuffle(order.begin(), order.end(), rng);
        for (int idx : order) {
            if (deck.size() == draws) break;
            const auto& g = grid_[cell(rng)];
            deck.push_back({idx, g.top, g.left, aug(rng)});
        }
    }
    return deck;
}

SampleBatch UnpairedSampler::batch(int epoch, int step, int batch_size) const {
    if (batch_size < 1) throw InvalidInputError("batch: batch_size must be >= 1");
    const auto ldr = ldr_deck(epoch);
    const auto hdr = hdr_deck(epoch, static_cast<size_t>(steps_per_epoch(batch_size)) * batch_size);
    const int p = cfg_.patch;

    SampleBatch b;
    for (auto& br : b.branches) br = nn::Tensor<float>(batch_size, p, p, 6);
    b.reference = nn::Tensor<float>(batch_size, p, p, 3);
    b.hdr_targets = nn::Tensor<float>(batch_size, p, p, 3);
    b.blur_targets = nn::Tensor<float>(batch_size, p, p, 3);

    for (int i = 0; i < batch_size; ++i) {
        const auto& dl = ldr[(static_cast<size_t>(step) * batch_size + i) % ldr.size()];
        const Scene& sc = scenes_[dl.index];
        for (int e = 0; e < 3; ++e) {
            Image x = apply_dihedral(crop(sc.exposures[e], dl.top, dl.left, p), dl.aug);
            Image h = apply_dihedral(crop(sc.radiance[e], dl.top, dl.left, p), dl.aug);
            write_patch(b.branches[e], i, x, 0);
            write_patch(b.branches[e], i, h, 3);
            if (e == cfg_.reference_index - 1) write_patch(b.reference, i, x, 0);
        }
        const auto& dh = hdr[static_cast<size_t>(step) * batch_size + i];
        const Target& tg = targets_[dh.index];
        write_patch(b.hdr_targets, i, apply_dihedral(crop(tg.tonemapped, dh.top, dh.left, p), dh.aug), 0);
        write_patch(b.blur_targets, i,
                    apply_dihedral(crop(tg.blur_tonemapped, dh.top, dh.left, p), dh.aug), 0);
    }
    return b;
}

SampleBatch sample_unpaired_batch(const DatasetManifest& manifest, const TrainConfig& config,
                                  long long rng_seed, int batch_size) {
    TrainConfig cfg = config;
    cfg.seed = rng_seed;
    UnpairedSampler sampler(manifest, cfg);
    return sampler.batch(0, 0, batch_size);
}

}  // namespace uphdr::data
