#pragma once

#include <cstring>
#include <sstream>

#include "uphdr/container.hpp"
#include "uphdr/nn/layers.hpp"

namespace uphdr::nn {

/// Frozen convolutional feature extractor for the perceptual content loss.
/// A stack of 3x3 conv + ReLU stages with 2x2 max-pools between groups; the
/// output is the activation at the designated tap. Parameters are never
/// updated: backward only propagates gradients to the input image.
template <typename T>
class FeatureExtractor {
public:
    FeatureExtractor() = default;

    /// Small seeded-random preset, /8 spatial at the tap. Default for
    /// desk-scale runs where no classifier weights file is configured.
    static FeatureExtractor tiny(uint64_t seed = 0x7ee1dull) {
        FeatureExtractor fe;
        fe.arch_ = {{16, false}, {32, true}, {64, true}, {64, true}};
        fe.build();
        std::mt19937_64 rng(seed);
        for (auto& conv : fe.convs_) {
            // He-style scale keeps activations in a usable range at depth.
            std::normal_distribution<double> dist(0.0, 0.1);
            for (T& v : conv.weight().value->v) v = static_cast<T>(dist(rng));
            conv.bias().value->fill(T(0));
        }
        fe.id_ = "tiny(seed=" + std::to_string(seed) + ")";
        return fe;
    }

    /// VGG19-prefix geometry up to the 4th group's last conv (tap is /8
    /// spatial). Weights must come from a converted classifier archive.
    static FeatureExtractor vgg19(const std::vector<NamedArray>& arrays) {
        FeatureExtractor fe;
        fe.arch_ = {{64, false}, {64, false}, {128, true}, {128, false},
                    {256, true}, {256, false}, {256, false}, {256, false},
                    {512, true}, {512, false}, {512, false}, {512, false}};
        fe.mean_ = {T(0.485), T(0.456), T(0.406)};
        fe.stddev_ = {T(0.229), T(0.224), T(0.225)};
        fe.build();
        static const char* names[] = {"conv1_1", "conv1_2", "conv2_1", "conv2_2",
                                      "conv3_1", "conv3_2", "conv3_3", "conv3_4",
                                      "conv4_1", "conv4_2", "conv4_3", "conv4_4"};
        for (size_t i = 0; i < fe.convs_.size(); ++i) {
            fe.load_array(arrays, std::string(names[i]) + ".weight", *fe.convs_[i].weight().value);
            fe.load_array(arrays, std::string(names[i]) + ".bias", *fe.convs_[i].bias().value);
        }
        fe.id_ = "vgg19-conv4_4";
        return fe;
    }

    Tensor<T> forward(const Tensor<T>& img, bool cache_for_backward) {
        Tensor<T> y = img;
        if (mean_[0] != T(0) || stddev_[0] != T(1)) {
            const size_t px = y.size() / y.c;
            for (size_t r = 0; r < px; ++r)
                for (int c = 0; c < y.c; ++c)
                    y.v[r * y.c + c] = (y.v[r * y.c + c] - mean_[c]) / stddev_[c];
        }
        for (size_t i = 0; i < arch_.size(); ++i) {
            if (arch_[i].pool_before) y = pools_[pool_of_[i]].forward(y, cache_for_backward);
            y = convs_[i].forward(y, cache_for_backward);
            y = relus_[i].forward(y, cache_for_backward);
        }
        return y;
    }

    /// Gradient w.r.t. the input image only; extractor weights stay frozen.
    Tensor<T> backward(const Tensor<T>& d_feat) {
        Tensor<T> d = d_feat;
        for (size_t ri = arch_.size(); ri-- > 0;) {
            d = convs_[ri].backward(relus_[ri].backward(d), /*accumulate_param_grads=*/false);
            if (arch_[ri].pool_before) d = pools_[pool_of_[ri]].backward(d);
        }
        const size_t px = d.size() / d.c;
        if (mean_[0] != T(0) || stddev_[0] != T(1))
            for (size_t r = 0; r < px; ++r)
                for (int c = 0; c < d.c; ++c) d.v[r * d.c + c] /= stddev_[c];
        return d;
    }

    /// Spatial reduction factor between input and tap.
    int spatial_stride() const {
        int s = 1;
        for (const auto& st : arch_)
            if (st.pool_before) s *= 2;
        return s;
    }

    std::vector<Param<T>> params() const {
        std::vector<Param<T>> p;
        for (const auto& c : convs_) c.collect(p);
        return p;
    }

    /// Digest of the serialized weights, recorded in run logs.
    std::string weights_sha256() const {
        std::string blob;
        for (const auto& c : convs_) {
            const auto& w = c.weight().value->v;
            const auto& b = c.bias().value->v;
            blob.append(reinterpret_cast<const char*>(w.data()), w.size() * sizeof(T));
            blob.append(reinterpret_cast<const char*>(b.data()), b.size() * sizeof(T));
        }
        return sha256_hex(blob.data(), blob.size());
    }

    const std::string& id() const { return id_; }

private:
    struct Stage {
        int channels;
        bool pool_before;
    };

    void build() {
        int in_ch = 3;
        int pool_idx = 0;
        pool_of_.resize(arch_.size(), -1);
        for (size_t i = 0; i < arch_.size(); ++i) {
            if (arch_[i].pool_before) {
                pools_.emplace_back();
                pool_of_[i] = pool_idx++;
            }
            convs_.emplace_back("feat.conv" + std::to_string(i + 1), in_ch, arch_[i].channels, 3, 1);
            relus_.emplace_back(T(0));
            in_ch = arch_[i].channels;
        }
    }

    void load_array(const std::vector<NamedArray>& arrays, const std::string& name, Tensor<T>& dst) {
        for (const auto& a : arrays) {
            if (a.name != name) continue;
            if (a.dtype != "f4") throw ConfigError("extractor weights: expected f4 for " + name);
            const size_t n = a.bytes.size() / sizeof(float);
            if (n != dst.size())
                throw ConfigError("extractor weights: size mismatch for " + name);
            const float* src = reinterpret_cast<const float*>(a.bytes.data());
            for (size_t i = 0; i < n; ++i) dst.v[i] = static_cast<T>(src[i]);
            return;
        }
        throw ConfigError("extractor weights: missing array " + name);
    }

    std::vector<Stage> arch_;
    std::vector<Conv2d<T>> convs_;
    std::vector<LeakyReLU<T>> relus_;
    std::vector<MaxPool2x2<T>> pools_;
    std::vector<int> pool_of_;
    std::array<T, 3> mean_{T(0), T(0), T(0)};
    std::array<T, 3> stddev_{T(1), T(1), T(1)};
    std::string id_ = "unset";
};

}  // namespace uphdr::nn
