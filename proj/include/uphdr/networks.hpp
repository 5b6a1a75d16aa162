#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "uphdr/nn/adam.hpp"
#include "uphdr/nn/layers.hpp"

namespace uphdr::nn {

struct GeneratorOptions {
    int res_blocks = 6;
    bool shared_encoder = true;
    bool transposed_upsample = false;
    double init_std = 0.02;
};

/// One encoder branch: E1 (7x7 -> 64), E2 (3x3/2 -> 128, 3x3 -> 128),
/// E3 (3x3/2 -> 256, 3x3 -> 256). Output is P/4 x P/4 x 256.
template <typename T>
struct EncoderBranch {
    Conv2d<T> e1_conv;
    BatchNorm2d<T> e1_bn;
    Conv2d<T> e2_conv1, e2_conv2;
    BatchNorm2d<T> e2_bn;
    Conv2d<T> e3_conv1, e3_conv2;
    BatchNorm2d<T> e3_bn;
    LeakyReLU<T> relu1, relu2, relu3;

    EncoderBranch() = default;
    explicit EncoderBranch(const std::string& prefix)
        : e1_conv(prefix + ".E1.conv", 6, 64, 7, 1),
          e1_bn(prefix + ".E1.bn", 64),
          e2_conv1(prefix + ".E2.conv1", 64, 128, 3, 2),
          e2_conv2(prefix + ".E2.conv2", 128, 128, 3, 1),
          e2_bn(prefix + ".E2.bn", 128),
          e3_conv1(prefix + ".E3.conv1", 128, 256, 3, 2),
          e3_conv2(prefix + ".E3.conv2", 256, 256, 3, 1),
          e3_bn(prefix + ".E3.bn", 256) {}

    void tie_to(const EncoderBranch& o) {
        e1_conv.tie_to(o.e1_conv);
        e1_bn.tie_to(o.e1_bn);
        e2_conv1.tie_to(o.e2_conv1);
        e2_conv2.tie_to(o.e2_conv2);
        e2_bn.tie_to(o.e2_bn);
        e3_conv1.tie_to(o.e3_conv1);
        e3_conv2.tie_to(o.e3_conv2);
        e3_bn.tie_to(o.e3_bn);
    }

    void init(std::mt19937_64& rng, double std_dev) {
        e1_conv.init(rng, std_dev);
        e2_conv1.init(rng, std_dev);
        e2_conv2.init(rng, std_dev);
        e3_conv1.init(rng, std_dev);
        e3_conv2.init(rng, std_dev);
    }

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        auto y = relu1.forward(e1_bn.forward(e1_conv.forward(x, train), train), train);
        y = e2_conv1.forward(y, train);
        y = relu2.forward(e2_bn.forward(e2_conv2.forward(y, train), train), train);
        y = e3_conv1.forward(y, train);
        return relu3.forward(e3_bn.forward(e3_conv2.forward(y, train), train), train);
    }

    Tensor<T> backward(const Tensor<T>& dy, bool acc) {
        auto d = e3_conv2.backward(e3_bn.backward(relu3.backward(dy), acc), acc);
        d = e3_conv1.backward(d, acc);
        d = e2_conv2.backward(e2_bn.backward(relu2.backward(d), acc), acc);
        d = e2_conv1.backward(d, acc);
        return e1_conv.backward(e1_bn.backward(relu1.backward(d), acc), acc);
    }

    void collect(std::vector<Param<T>>& p, std::vector<Buffer<T>>& b) const {
        e1_conv.collect(p);
        e1_bn.collect(p);
        e1_bn.collect_buffers(b);
        e2_conv1.collect(p);
        e2_conv2.collect(p);
        e2_bn.collect(p);
        e2_bn.collect_buffers(b);
        e3_conv1.collect(p);
        e3_conv2.collect(p);
        e3_bn.collect(p);
        e3_bn.collect_buffers(b);
    }
};

/// Two 3x3 convolutions at 256 channels with an element-wise-sum skip.
template <typename T>
struct ResidualBlock {
    Conv2d<T> conv1, conv2;
    BatchNorm2d<T> bn1, bn2;
    LeakyReLU<T> relu;

    ResidualBlock() = default;
    explicit ResidualBlock(const std::string& prefix)
        : conv1(prefix + ".conv1", 256, 256, 3, 1),
          conv2(prefix + ".conv2", 256, 256, 3, 1),
          bn1(prefix + ".bn1", 256),
          bn2(prefix + ".bn2", 256) {}

    void init(std::mt19937_64& rng, double std_dev) {
        conv1.init(rng, std_dev);
        conv2.init(rng, std_dev);
    }

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        auto y = relu.forward(bn1.forward(conv1.forward(x, train), train), train);
        y = bn2.forward(conv2.forward(y, train), train);
        y += x;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy, bool acc) {
        auto d = conv2.backward(bn2.backward(dy, acc), acc);
        d = conv1.backward(bn1.backward(relu.backward(d), acc), acc);
        d += dy;  // skip path
        return d;
    }

    void collect(std::vector<Param<T>>& p, std::vector<Buffer<T>>& b) const {
        conv1.collect(p);
        bn1.collect(p);
        bn1.collect_buffers(b);
        conv2.collect(p);
        bn2.collect(p);
        bn2.collect_buffers(b);
    }
};

/// Upsampling block: doubles the spatial side and changes channel count,
/// then refines with a 3x3 convolution + BN + ReLU.
template <typename T>
struct UpBlock {
    bool transposed = false;
    NearestUpsample2x<T> up;
    Conv2d<T> conv1;       // used when !transposed
    TransposedConv2d<T> tconv;  // used when transposed
    Conv2d<T> conv2;
    BatchNorm2d<T> bn;
    LeakyReLU<T> relu;

    UpBlock() = default;
    UpBlock(const std::string& prefix, int in_ch, int out_ch, bool use_transposed)
        : transposed(use_transposed),
          conv1(prefix + ".conv1", in_ch, out_ch, 3, 1),
          tconv(prefix + ".conv1", in_ch, out_ch),
          conv2(prefix + ".conv2", out_ch, out_ch, 3, 1),
          bn(prefix + ".bn", out_ch) {}

    void init(std::mt19937_64& rng, double std_dev) {
        if (transposed)
            tconv.init(rng, std_dev);
        else
            conv1.init(rng, std_dev);
        conv2.init(rng, std_dev);
    }

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        Tensor<T> y = transposed ? tconv.forward(x, train)
                                 : conv1.forward(up.forward(x, train), train);
        return relu.forward(bn.forward(conv2.forward(y, train), train), train);
    }

    Tensor<T> backward(const Tensor<T>& dy, bool acc) {
        auto d = conv2.backward(bn.backward(relu.backward(dy), acc), acc);
        if (transposed) return tconv.backward(d, acc);
        return up.backward(conv1.backward(d, acc));
    }

    void collect(std::vector<Param<T>>& p, std::vector<Buffer<T>>& b) const {
        if (transposed)
            tconv.collect(p);
        else
            conv1.collect(p);
        conv2.collect(p);
        bn.collect(p);
        bn.collect_buffers(b);
    }
};

/// Three-branch fusion generator. Each branch consumes a P x P x 6 tensor
/// (exposure concatenated with its radiance mapping); branch features are
/// concatenated, merged to 256 channels, refined by residual blocks and
/// decoded back to a P x P x 3 radiance image in [0,1].
template <typename T>
class Generator {
public:
    Generator() = default;
    Generator(const GeneratorOptions& opt, std::mt19937_64& rng) : opt_(opt) {
        branches_[0] = EncoderBranch<T>(opt.shared_encoder ? "G" : "G.b1");
        if (opt.shared_encoder) {
            branches_[1] = branches_[0];
            branches_[2] = branches_[0];
            branches_[1].tie_to(branches_[0]);
            branches_[2].tie_to(branches_[0]);
        } else {
            branches_[1] = EncoderBranch<T>("G.b2");
            branches_[2] = EncoderBranch<T>("G.b3");
        }
        merge_conv_ = Conv2d<T>("G.merge.conv", 768, 256, 3, 1);
        merge_bn_ = BatchNorm2d<T>("G.merge.bn", 256);
        res_.resize(opt.res_blocks);
        for (int i = 0; i < opt.res_blocks; ++i)
            res_[i] = ResidualBlock<T>("G.res" + std::to_string(i + 1));
        d1_ = UpBlock<T>("G.D1", 256, 128, opt.transposed_upsample);
        d2_ = UpBlock<T>("G.D2", 128, 64, opt.transposed_upsample);
        d3_conv_ = Conv2d<T>("G.D3.conv", 64, 3, 7, 1);

        branches_[0].init(rng, opt.init_std);
        if (!opt.shared_encoder) {
            branches_[1].init(rng, opt.init_std);
            branches_[2].init(rng, opt.init_std);
        }
        merge_conv_.init(rng, opt.init_std);
        for (auto& r : res_) r.init(rng, opt.init_std);
        d1_.init(rng, opt.init_std);
        d2_.init(rng, opt.init_std);
        d3_conv_.init(rng, opt.init_std);
    }

    Tensor<T> forward(const std::array<Tensor<T>, 3>& stacks, bool train) {
        const auto& s0 = stacks[0];
        if (s0.h % 4 || s0.w % 4)
            throw ShapeError("Generator: input sides must be divisible by 4");
        for (const auto& s : stacks) {
            if (s.c != 6) throw ShapeError("Generator: each branch expects 6 channels");
            if (s.n != s0.n || s.h != s0.h || s.w != s0.w)
                throw ShapeError("Generator: branch shapes differ");
        }
        std::array<Tensor<T>, 3> feats;
        for (int i = 0; i < 3; ++i) feats[i] = branches_[i].forward(stacks[i], train);

        Tensor<T> cat(feats[0].n, feats[0].h, feats[0].w, 768);
        const size_t px = cat.size() / 768;
        for (size_t r = 0; r < px; ++r)
            for (int i = 0; i < 3; ++i)
                for (int c = 0; c < 256; ++c)
                    cat.v[r * 768 + i * 256 + c] = feats[i].v[r * 256 + c];

        auto y = merge_relu_.forward(merge_bn_.forward(merge_conv_.forward(cat, train), train), train);
        for (auto& r : res_) y = r.forward(y, train);
        y = d1_.forward(y, train);
        y = d2_.forward(y, train);
        return out_sigmoid_.forward(d3_conv_.forward(y, train), train);
    }

    /// Accumulates parameter gradients; input gradients are not returned
    /// (nothing upstream of the exposures needs them).
    void backward(const Tensor<T>& d_out, bool accumulate_param_grads = true) {
        const bool acc = accumulate_param_grads;
        auto d = d3_conv_.backward(out_sigmoid_.backward(d_out), acc);
        d = d2_.backward(d, acc);
        d = d1_.backward(d, acc);
        for (auto it = res_.rbegin(); it != res_.rend(); ++it) d = it->backward(d, acc);
        d = merge_conv_.backward(merge_bn_.backward(merge_relu_.backward(d), acc), acc);

        const size_t px = d.size() / 768;
        for (int i = 0; i < 3; ++i) {
            Tensor<T> di(d.n, d.h, d.w, 256);
            for (size_t r = 0; r < px; ++r)
                for (int c = 0; c < 256; ++c)
                    di.v[r * 256 + c] = d.v[r * 768 + i * 256 + c];
            branches_[i].backward(di, acc);
        }
    }

    std::vector<Param<T>> params() const {
        std::vector<Param<T>> all;
        std::vector<Buffer<T>> bufs;
        for (const auto& br : branches_) br.collect(all, bufs);
        merge_conv_.collect(all);
        merge_bn_.collect(all);
        for (const auto& r : res_) r.collect(all, bufs);
        d1_.collect(all, bufs);
        d2_.collect(all, bufs);
        d3_conv_.collect(all);
        return dedupe(all);
    }

    std::vector<Buffer<T>> buffers() const {
        std::vector<Param<T>> all;
        std::vector<Buffer<T>> bufs;
        for (const auto& br : branches_) br.collect(all, bufs);
        merge_bn_.collect_buffers(bufs);
        for (const auto& r : res_) r.collect(all, bufs);
        d1_.collect(all, bufs);
        d2_.collect(all, bufs);
        return dedupe_buffers(bufs);
    }

    void zero_grad() {
        for (auto& p : params()) p.grad->fill(T(0));
    }

    const GeneratorOptions& options() const { return opt_; }

    static std::vector<Param<T>> dedupe(const std::vector<Param<T>>& in) {
        std::vector<Param<T>> out;
        for (const auto& p : in) {
            bool seen = false;
            for (const auto& q : out)
                if (q.value.get() == p.value.get()) { seen = true; break; }
            if (!seen) out.push_back(p);
        }
        return out;
    }

    static std::vector<Buffer<T>> dedupe_buffers(const std::vector<Buffer<T>>& in) {
        std::vector<Buffer<T>> out;
        for (const auto& p : in) {
            bool seen = false;
            for (const auto& q : out)
                if (q.value.get() == p.value.get()) { seen = true; break; }
            if (!seen) out.push_back(p);
        }
        return out;
    }

private:
    GeneratorOptions opt_;
    std::array<EncoderBranch<T>, 3> branches_;
    Conv2d<T> merge_conv_;
    BatchNorm2d<T> merge_bn_;
    LeakyReLU<T> merge_relu_;
    std::vector<ResidualBlock<T>> res_;
    UpBlock<T> d1_, d2_;
    Conv2d<T> d3_conv_;
    Sigmoid<T> out_sigmoid_;
};

/// PatchGAN discriminator C1-C5: two stride-2 stages, so the raw score map
/// is input/4 per side, one channel, no output activation.
template <typename T>
class Discriminator {
public:
    Discriminator() = default;
    explicit Discriminator(std::mt19937_64& rng, double init_std = 0.02, double slope = 0.2)
        : c1_("D.C1.conv", 3, 32, 3, 1),
          c2a_("D.C2.conv1", 32, 64, 3, 2),
          c2b_("D.C2.conv2", 64, 64, 3, 1),
          c2_bn_("D.C2.bn", 64),
          c3a_("D.C3.conv1", 64, 128, 3, 2),
          c3b_("D.C3.conv2", 128, 128, 3, 1),
          c3_bn_("D.C3.bn", 128),
          c4_("D.C4.conv", 128, 256, 3, 1),
          c4_bn_("D.C4.bn", 256),
          c5_("D.C5.conv", 256, 1, 3, 1),
          lrelu_(static_cast<T>(slope)), lrelu2a_(static_cast<T>(slope)),
          lrelu2b_(static_cast<T>(slope)), lrelu3a_(static_cast<T>(slope)),
          lrelu3b_(static_cast<T>(slope)), lrelu4_(static_cast<T>(slope)) {
        c1_.init(rng, init_std);
        c2a_.init(rng, init_std);
        c2b_.init(rng, init_std);
        c3a_.init(rng, init_std);
        c3b_.init(rng, init_std);
        c4_.init(rng, init_std);
        c5_.init(rng, init_std);
    }

    Tensor<T> forward(const Tensor<T>& img, bool train) {
        if (img.h % 4 || img.w % 4)
            throw ShapeError("Discriminator: input sides must be divisible by 4");
        if (img.c != 3) throw ShapeError("Discriminator: expects 3 channels");
        auto y = lrelu_.forward(c1_.forward(img, train), train);
        y = lrelu2a_.forward(c2a_.forward(y, train), train);
        y = lrelu2b_.forward(c2_bn_.forward(c2b_.forward(y, train), train), train);
        y = lrelu3a_.forward(c3a_.forward(y, train), train);
        y = lrelu3b_.forward(c3_bn_.forward(c3b_.forward(y, train), train), train);
        y = lrelu4_.forward(c4_bn_.forward(c4_.forward(y, train), train), train);
        return c5_.forward(y, train);
    }

    Tensor<T> backward(const Tensor<T>& d_score, bool accumulate_param_grads = true) {
        const bool acc = accumulate_param_grads;
        auto d = c5_.backward(d_score, acc);
        d = c4_.backward(c4_bn_.backward(lrelu4_.backward(d), acc), acc);
        d = c3b_.backward(c3_bn_.backward(lrelu3b_.backward(d), acc), acc);
        d = c3a_.backward(lrelu3a_.backward(d), acc);
        d = c2b_.backward(c2_bn_.backward(lrelu2b_.backward(d), acc), acc);
        d = c2a_.backward(lrelu2a_.backward(d), acc);
        return c1_.backward(lrelu_.backward(d), acc);
    }

    std::vector<Param<T>> params() const {
        std::vector<Param<T>> p;
        c1_.collect(p);
        c2a_.collect(p);
        c2b_.collect(p);
        c2_bn_.collect(p);
        c3a_.collect(p);
        c3b_.collect(p);
        c3_bn_.collect(p);
        c4_.collect(p);
        c4_bn_.collect(p);
        c5_.collect(p);
        return p;
    }

    std::vector<Buffer<T>> buffers() const {
        std::vector<Buffer<T>> b;
        c2_bn_.collect_buffers(b);
        c3_bn_.collect_buffers(b);
        c4_bn_.collect_buffers(b);
        return b;
    }

    void zero_grad() {
        for (auto& p : params()) p.grad->fill(T(0));
    }

private:
    Conv2d<T> c1_, c2a_, c2b_;
    BatchNorm2d<T> c2_bn_;
    Conv2d<T> c3a_, c3b_;
    BatchNorm2d<T> c3_bn_;
    Conv2d<T> c4_;
    BatchNorm2d<T> c4_bn_;
    Conv2d<T> c5_;
    LeakyReLU<T> lrelu_, lrelu2a_, lrelu2b_, lrelu3a_, lrelu3b_, lrelu4_;
};

/// Non-overlapping window-wise minimum over a score map. The argmin index
/// (first minimum in row-major scan) is kept so the generator gradient can
/// be routed back to exactly one cell per window.
template <typename T>
struct MinPoolResult {
    Tensor<T> pooled;
    std::vector<size_t> argmin;  // flat indices into the source map
    std::array<int, 4> in_shape{};
};

template <typename T>
MinPoolResult<T> min_pool(const Tensor<T>& f, int window) {
    if (window <= 0) throw InvalidInputError("min_pool: window must be positive");
    if (f.h % window || f.w % window)
        throw ShapeError("min_pool: map side not divisible by window");
    MinPoolResult<T> r;
    r.in_shape = {f.n, f.h, f.w, f.c};
    r.pooled = Tensor<T>(f.n, f.h / window, f.w / window, f.c);
    r.argmin.assign(r.pooled.size(), 0);
    size_t oi = 0;
    for (int in = 0; in < f.n; ++in)
        for (int oy = 0; oy < r.pooled.h; ++oy)
            for (int ox = 0; ox < r.pooled.w; ++ox)
                for (int c = 0; c < f.c; ++c, ++oi) {
                    T best{};
                    size_t best_idx = 0;
                    bool first = true;
                    for (int dy = 0; dy < window; ++dy)
                        for (int dx = 0; dx < window; ++dx) {
                            size_t idx = ((static_cast<size_t>(in) * f.h + oy * window + dy) * f.w +
                                          ox * window + dx) * f.c + c;
                            if (first || f.v[idx] < best) {
                                best = f.v[idx];
                                best_idx = idx;
                                first = false;
                            }
                        }
                    r.pooled.v[oi] = best;
                    r.argmin[oi] = best_idx;
                }
    return r;
}

template <typename T>
Tensor<T> min_pool_backward(const MinPoolResult<T>& r, const Tensor<T>& d_pooled) {
    Tensor<T> dx(r.in_shape[0], r.in_shape[1], r.in_shape[2], r.in_shape[3]);
    for (size_t i = 0; i < d_pooled.size(); ++i) dx.v[r.argmin[i]] += d_pooled.v[i];
    return dx;
}

}  // namespace uphdr::nn
