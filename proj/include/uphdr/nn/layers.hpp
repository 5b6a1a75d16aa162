#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "uphdr/nn/gemm.hpp"
#include "uphdr/nn/tensor.hpp"

namespace uphdr::nn {

/// Named parameter with its gradient accumulator. Values are shared_ptrs so
/// branches can tie weights: tied layers alias the same storage and their
/// gradients accumulate into one buffer.
template <typename T>
struct Param {
    std::string name;
    std::shared_ptr<Tensor<T>> value;
    std::shared_ptr<Tensor<T>> grad;
};

/// Non-trainable per-layer state that still belongs in checkpoints
/// (batch-norm running statistics).
template <typename T>
struct Buffer {
    std::string name;
    std::shared_ptr<Tensor<T>> value;
};

template <typename T>
Param<T> make_param(std::string name, int n, int h, int w, int c) {
    return Param<T>{std::move(name), std::make_shared<Tensor<T>>(n, h, w, c),
                    std::make_shared<Tensor<T>>(n, h, w, c)};
}

inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

/// 2D convolution over NHWC tensors with reflected borders ("same" output
/// grid; stride 2 halves each side). Weight layout is [k*k*in_ch, out_ch]
/// so the im2col product is a single row-major GEMM.
template <typename T>
class Conv2d {
public:
    Conv2d() = default;
    Conv2d(const std::string& name, int in_ch, int out_ch, int ksize, int stride)
        : in_ch_(in_ch), out_ch_(out_ch), k_(ksize), stride_(stride),
          weight_(make_param<T>(name + ".weight", 1, ksize, ksize, in_ch * out_ch)),
          bias_(make_param<T>(name + ".bias", 1, 1, 1, out_ch)) {}

    /// Ties this layer's parameters to another instance (shared encoder branches).
    void tie_to(const Conv2d& other) {
        weight_ = other.weight_;
        bias_ = other.bias_;
    }

    void init(std::mt19937_64& rng, double std_dev) {
        std::normal_distribution<double> dist(0.0, std_dev);
        for (T& v : weight_.value->v) v = static_cast<T>(dist(rng));
        bias_.value->fill(T(0));
    }

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        if (x.c != in_ch_) throw ShapeError("Conv2d: channel mismatch");
        if (train) x_ = x;
        const int oh = (x.h + stride_ - 1) / stride_;
        const int ow = (x.w + stride_ - 1) / stride_;
        im2col(x, oh, ow);
        Tensor<T> y(x.n, oh, ow, out_ch_);
        const int rows = x.n * oh * ow, kk = k_ * k_ * in_ch_;
        gemm_nn(rows, kk, out_ch_, cols_.data(), weight_.value->data(), y.data());
        const T* b = bias_.value->data();
        T* yd = y.data();
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < out_ch_; ++c) yd[static_cast<size_t>(r) * out_ch_ + c] += b[c];
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy, bool accumulate_param_grads = true) {
        const int oh = dy.h, ow = dy.w, rows = dy.n * oh * ow, kk = k_ * k_ * in_ch_;
        im2col(x_, oh, ow);
        if (accumulate_param_grads) {
            gemm_tn_acc(kk, rows, out_ch_, cols_.data(), dy.data(), weight_.grad->data());
            T* db = bias_.grad->data();
            const T* dyd = dy.data();
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < out_ch_; ++c) db[c] += dyd[static_cast<size_t>(r) * out_ch_ + c];
        }
        dcols_.resize(static_cast<size_t>(rows) * kk);
        gemm_nt(rows, out_ch_, kk, dy.data(), weight_.value->data(), dcols_.data());
        return col2im(dy.n, oh, ow);
    }

    void collect(std::vector<Param<T>>& out) const {
        out.push_back(weight_);
        out.push_back(bias_);
    }

    Param<T>& weight() { return weight_; }
    Param<T>& bias() { return bias_; }
    const Param<T>& weight() const { return weight_; }
    const Param<T>& bias() const { return bias_; }
    int kernel_size() const { return k_; }

private:
    void im2col(const Tensor<T>& x, int oh, int ow) {
        const int pad = (k_ - 1) / 2, kk = k_ * k_ * in_ch_;
        cols_.resize(static_cast<size_t>(x.n) * oh * ow * kk);
        T* col = cols_.data();
        for (int in = 0; in < x.n; ++in)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    for (int ky = 0; ky < k_; ++ky) {
                        const int sy = reflect_index(oy * stride_ - pad + ky, x.h);
                        for (int kx = 0; kx < k_; ++kx) {
                            const int sx = reflect_index(ox * stride_ - pad + kx, x.w);
                            const T* src = &x.v[((static_cast<size_t>(in) * x.h + sy) * x.w + sx) * in_ch_];
                            for (int c = 0; c < in_ch_; ++c) *col++ = src[c];
                        }
                    }
                }
    }

    Tensor<T> col2im(int n, int oh, int ow) {
        const int pad = (k_ - 1) / 2;
        Tensor<T> dx(n, x_.h, x_.w, in_ch_);
        const T* col = dcols_.data();
        for (int in = 0; in < n; ++in)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    for (int ky = 0; ky < k_; ++ky) {
                        const int sy = reflect_index(oy * stride_ - pad + ky, x_.h);
                        for (int kx = 0; kx < k_; ++kx) {
                            const int sx = reflect_index(ox * stride_ - pad + kx, x_.w);
                            T* dst = &dx.v[((static_cast<size_t>(in) * x_.h + sy) * x_.w + sx) * in_ch_];
                            for (int c = 0; c < in_ch_; ++c) dst[c] += *col++;
                        }
                    }
                }
        return dx;
    }

    int in_ch_ = 0, out_ch_ = 0, k_ = 3, stride_ = 1;
    Param<T> weight_, bias_;
    Tensor<T> x_;
    std::vector<T> cols_, dcols_;
};

/// Transposed 3x3 stride-2 convolution (zero padding, output side doubles).
/// Alternative decoder upsampling path.
template <typename T>
class TransposedConv2d {
public:
    TransposedConv2d() = default;
    TransposedConv2d(const std::string& name, int in_ch, int out_ch)
        : in_ch_(in_ch), out_ch_(out_ch),
          weight_(make_param<T>(name + ".weight", 1, k_, k_, in_ch * out_ch)),
          bias_(make_param<T>(name + ".bias", 1, 1, 1, out_ch)) {}

    void init(std::mt19937_64& rng, double std_dev) {
        std::normal_distribution<double> dist(0.0, std_dev);
        for (T& v : weight_.value->v) v = static_cast<T>(dist(rng));
        bias_.value->fill(T(0));
    }

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        if (x.c != in_ch_) throw ShapeError("TransposedConv2d: channel mismatch");
        if (train) x_ = x;
        const int oh = x.h * 2, ow = x.w * 2;
        const int rows = x.n * x.h * x.w, kk = k_ * k_ * out_ch_;
        cols_.resize(static_cast<size_t>(rows) * kk);
        // cols[r, (ky,kx,co)] = sum_ci x[r,ci] * w[ci,(ky,kx,co)]
        gemm_nn(rows, in_ch_, kk, x.data(), weight_.value->data(), cols_.data());
        Tensor<T> y(x.n, oh, ow, out_ch_);
        const T* col = cols_.data();
        for (int in = 0; in < x.n; ++in)
            for (int iy = 0; iy < x.h; ++iy)
                for (int ix = 0; ix < x.w; ++ix)
                    for (int ky = 0; ky < k_; ++ky) {
                        const int oy = iy * 2 - 1 + ky;
                        for (int kx = 0; kx < k_; ++kx) {
                            const int ox = ix * 2 - 1 + kx;
                            if (oy < 0 || oy >= oh || ox < 0 || ox >= ow) {
                                col += out_ch_;
                                continue;
                            }
                            T* dst = &y.v[((static_cast<size_t>(in) * oh + oy) * ow + ox) * out_ch_];
                            for (int c = 0; c < out_ch_; ++c) dst[c] += col[c];
                            col += out_ch_;
                        }
                    }
        const T* b = bias_.value->data();
        T* yd = y.data();
        const size_t px = y.size() / out_ch_;
        for (size_t r = 0; r < px; ++r)
            for (int c = 0; c < out_ch_; ++c) yd[r * out_ch_ + c] += b[c];
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy, bool accumulate_param_grads = true) {
        const int rows = x_.n * x_.h * x_.w, kk = k_ * k_ * out_ch_;
        dcols_.resize(static_cast<size_t>(rows) * kk);
        T* col = dcols_.data();
        for (int in = 0; in < x_.n; ++in)
            for (int iy = 0; iy < x_.h; ++iy)
                for (int ix = 0; ix < x_.w; ++ix)
                    for (int ky = 0; ky < k_; ++ky) {
                        const int oy = iy * 2 - 1 + ky;
                        for (int kx = 0; kx < k_; ++kx) {
                            const int ox = ix * 2 - 1 + kx;
                            if (oy < 0 || oy >= dy.h || ox < 0 || ox >= dy.w) {
                                for (int c = 0; c < out_ch_; ++c) *col++ = T(0);
                                continue;
                            }
                            const T* src = &dy.v[((static_cast<size_t>(in) * dy.h + oy) * dy.w + ox) * out_ch_];
                            for (int c = 0; c < out_ch_; ++c) *col++ = src[c];
                        }
                    }
        if (accumulate_param_grads) {
            gemm_tn_acc(in_ch_, rows, kk, x_.data(), dcols_.data(), weight_.grad->data());
            T* db = bias_.grad->data();
            const T* dyd = dy.data();
            const size_t px = dy.size() / out_ch_;
            for (size_t r = 0; r < px; ++r)
                for (int c = 0; c < out_ch_; ++c) db[c] += dyd[r * out_ch_ + c];
        }
        Tensor<T> dx(x_.n, x_.h, x_.w, in_ch_);
        gemm_nt(rows, kk, in_ch_, dcols_.data(), weight_.value->data(), dx.data());
        return dx;
    }

    void collect(std::vector<Param<T>>& out) const {
        out.push_back(weight_);
        out.push_back(bias_);
    }

private:
    static constexpr int k_ = 3;
    int in_ch_ = 0, out_ch_ = 0;
    Param<T> weight_, bias_;
    Tensor<T> x_;
    std::vector<T> cols_, dcols_;
};

/// Batch normalization over N,H,W per channel. Training mode uses batch
/// statistics and updates running estimates; inference uses the frozen
/// running estimates.
template <typename T>
class BatchNorm2d {
public:
    BatchNorm2d() = default;
    BatchNorm2d(const std::string& name, int ch)
        : ch_(ch),
          gamma_(make_param<T>(name + ".gamma", 1, 1, 1, ch)),
          beta_(make_param<T>(name + ".beta", 1, 1, 1, ch)),
          running_mean_{name + ".running_mean", std::make_shared<Tensor<T>>(1, 1, 1, ch)},
          running_var_{name + ".running_var", std::make_shared<Tensor<T>>(1, 1, 1, ch)} {
        gamma_.value->fill(T(1));
        running_var_.value->fill(T(1));
    }

    void tie_to(const BatchNorm2d& other) {
        gamma_ = other.gamma_;
        beta_ = other.beta_;
        running_mean_ = other.running_mean_;
        running_var_ = other.running_var_;
    }

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        if (x.c != ch_) throw ShapeError("BatchNorm2d: channel mismatch");
        const size_t m = x.size() / ch_;
        Tensor<T> y(x.n, x.h, x.w, x.c);
        if (train) {
            mean_.assign(ch_, T(0));
            inv_std_.assign(ch_, T(0));
            std::vector<T> var(ch_, T(0));
            for (size_t r = 0; r < m; ++r)
                for (int c = 0; c < ch_; ++c) mean_[c] += x.v[r * ch_ + c];
            for (int c = 0; c < ch_; ++c) mean_[c] /= static_cast<T>(m);
            for (size_t r = 0; r < m; ++r)
                for (int c = 0; c < ch_; ++c) {
                    T d = x.v[r * ch_ + c] - mean_[c];
                    var[c] += d * d;
                }
            for (int c = 0; c < ch_; ++c) {
                var[c] /= static_cast<T>(m);
                inv_std_[c] = T(1) / std::sqrt(var[c] + eps_);
                (*running_mean_.value).v[c] =
                    (T(1) - momentum_) * (*running_mean_.value).v[c] + momentum_ * mean_[c];
                (*running_var_.value).v[c] =
                    (T(1) - momentum_) * (*running_var_.value).v[c] + momentum_ * var[c];
            }
            xhat_ = Tensor<T>(x.n, x.h, x.w, x.c);
            const T* g = gamma_.value->data();
            const T* b = beta_.value->data();
            for (size_t r = 0; r < m; ++r)
                for (int c = 0; c < ch_; ++c) {
                    T xh = (x.v[r * ch_ + c] - mean_[c]) * inv_std_[c];
                    xhat_.v[r * ch_ + c] = xh;
                    y.v[r * ch_ + c] = g[c] * xh + b[c];
                }
        } else {
            const T* g = gamma_.value->data();
            const T* b = beta_.value->data();
            const T* rm = running_mean_.value->data();
            const T* rv = running_var_.value->data();
            for (size_t r = 0; r < m; ++r)
                for (int c = 0; c < ch_; ++c)
                    y.v[r * ch_ + c] =
                        g[c] * (x.v[r * ch_ + c] - rm[c]) / std::sqrt(rv[c] + eps_) + b[c];
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy, bool accumulate_param_grads = true) {
        const size_t m = dy.size() / ch_;
        std::vector<T> sum_dy(ch_, T(0)), sum_dy_xhat(ch_, T(0));
        for (size_t r = 0; r < m; ++r)
            for (int c = 0; c < ch_; ++c) {
                sum_dy[c] += dy.v[r * ch_ + c];
                sum_dy_xhat[c] += dy.v[r * ch_ + c] * xhat_.v[r * ch_ + c];
            }
        if (accumulate_param_grads) {
            for (int c = 0; c < ch_; ++c) {
                gamma_.grad->v[c] += sum_dy_xhat[c];
                beta_.grad->v[c] += sum_dy[c];
            }
        }
        Tensor<T> dx(dy.n, dy.h, dy.w, dy.c);
        const T* g = gamma_.value->data();
        const T inv_m = T(1) / static_cast<T>(m);
        for (size_t r = 0; r < m; ++r)
            for (int c = 0; c < ch_; ++c) {
                dx.v[r * ch_ + c] =
                    g[c] * inv_std_[c] *
                    (dy.v[r * ch_ + c] - sum_dy[c] * inv_m - xhat_.v[r * ch_ + c] * sum_dy_xhat[c] * inv_m);
            }
        return dx;
    }

    void collect(std::vector<Param<T>>& out) const {
        out.push_back(gamma_);
        out.push_back(beta_);
    }
    void collect_buffers(std::vector<Buffer<T>>& out) const {
        out.push_back(running_mean_);
        out.push_back(running_var_);
    }

private:
    int ch_ = 0;
    static constexpr T eps_ = T(1e-5);
    static constexpr T momentum_ = T(0.1);
    Param<T> gamma_, beta_;
    Buffer<T> running_mean_, running_var_;
    std::vector<T> mean_, inv_std_;
    Tensor<T> xhat_;
};

/// LeakyReLU; slope 0 gives plain ReLU.
template <typename T>
class LeakyReLU {
public:
    explicit LeakyReLU(T slope = T(0)) : slope_(slope) {}

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        if (train) x_ = x;
        Tensor<T> y(x.n, x.h, x.w, x.c);
        for (size_t i = 0; i < x.size(); ++i)
            y.v[i] = x.v[i] > T(0) ? x.v[i] : slope_ * x.v[i];
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        Tensor<T> dx(dy.n, dy.h, dy.w, dy.c);
        for (size_t i = 0; i < dy.size(); ++i)
            dx.v[i] = x_.v[i] > T(0) ? dy.v[i] : slope_ * dy.v[i];
        return dx;
    }

private:
    T slope_;
    Tensor<T> x_;
};

template <typename T>
class Sigmoid {
public:
    Tensor<T> forward(const Tensor<T>& x, bool train) {
        Tensor<T> y(x.n, x.h, x.w, x.c);
        for (size_t i = 0; i < x.size(); ++i)
            y.v[i] = T(1) / (T(1) + std::exp(-x.v[i]));
        if (train) y_ = y;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        Tensor<T> dx(dy.n, dy.h, dy.w, dy.c);
        for (size_t i = 0; i < dy.size(); ++i)
            dx.v[i] = dy.v[i] * y_.v[i] * (T(1) - y_.v[i]);
        return dx;
    }

private:
    Tensor<T> y_;
};

/// Differentiable mu-law compression applied to network outputs so losses
/// see tonemapped images.
template <typename T>
class MuLaw {
public:
    explicit MuLaw(T mu = T(5000)) : mu_(mu), denom_(std::log1p(mu)) {}

    Tensor<T> forward(const Tensor<T>& x, bool train) {
        if (train) x_ = x;
        Tensor<T> y(x.n, x.h, x.w, x.c);
        for (size_t i = 0; i < x.size(); ++i)
            y.v[i] = std::log1p(mu_ * x.v[i]) / denom_;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        Tensor<T> dx(dy.n, dy.h, dy.w, dy.c);
        for (size_t i = 0; i < dy.size(); ++i)
            dx.v[i] = dy.v[i] * mu_ / (denom_ * (T(1) + mu_ * x_.v[i]));
        return dx;
    }

private:
    T mu_, denom_;
    Tensor<T> x_;
};

/// 2x nearest-neighbour upsampling (the checkerboard-free decoder path;
/// each up block follows this with a 3x3 convolution).
template <typename T>
class NearestUpsample2x {
public:
    Tensor<T> forward(const Tensor<T>& x, bool) {
        Tensor<T> y(x.n, x.h * 2, x.w * 2, x.c);
        for (int in = 0; in < x.n; ++in)
            for (int iy = 0; iy < y.h; ++iy)
                for (int ix = 0; ix < y.w; ++ix) {
                    const T* src = &x.v[((static_cast<size_t>(in) * x.h + iy / 2) * x.w + ix / 2) * x.c];
                    T* dst = &y.v[((static_cast<size_t>(in) * y.h + iy) * y.w + ix) * x.c];
                    for (int c = 0; c < x.c; ++c) dst[c] = src[c];
                }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        Tensor<T> dx(dy.n, dy.h / 2, dy.w / 2, dy.c);
        for (int in = 0; in < dy.n; ++in)
            for (int iy = 0; iy < dy.h; ++iy)
                for (int ix = 0; ix < dy.w; ++ix) {
                    const T* src = &dy.v[((static_cast<size_t>(in) * dy.h + iy) * dy.w + ix) * dy.c];
                    T* dst = &dx.v[((static_cast<size_t>(in) * dx.h + iy / 2) * dx.w + ix / 2) * dy.c];
                    for (int c = 0; c < dy.c; ++c) dst[c] += src[c];
                }
        return dx;
    }
};

/// 2x2 stride-2 max pooling (feature-extractor downsampling).
template <typename T>
class MaxPool2x2 {
public:
    Tensor<T> forward(const Tensor<T>& x, bool train) {
        if (x.h % 2 || x.w % 2) throw ShapeError("MaxPool2x2: odd spatial size");
        Tensor<T> y(x.n, x.h / 2, x.w / 2, x.c);
        if (train) arg_.assign(y.size(), 0);
        in_shape_ = {x.n, x.h, x.w, x.c};
        size_t oi = 0;
        for (int in = 0; in < x.n; ++in)
            for (int oy = 0; oy < y.h; ++oy)
                for (int ox = 0; ox < y.w; ++ox)
                    for (int c = 0; c < x.c; ++c, ++oi) {
                        T best{};
                        size_t best_idx = 0;
                        bool first = true;
                        for (int dy = 0; dy < 2; ++dy)
                            for (int dx = 0; dx < 2; ++dx) {
                                size_t idx = ((static_cast<size_t>(in) * x.h + oy * 2 + dy) * x.w + ox * 2 + dx) * x.c + c;
                                if (first || x.v[idx] > best) {
                                    best = x.v[idx];
                                    best_idx = idx;
                                    first = false;
                                }
                            }
                        y.v[oi] = best;
                        if (train) arg_[oi] = best_idx;
                    }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        Tensor<T> dx(in_shape_[0], in_shape_[1], in_shape_[2], in_shape_[3]);
        for (size_t i = 0; i < dy.size(); ++i) dx.v[arg_[i]] += dy.v[i];
        return dx;
    }

private:
    std::vector<size_t> arg_;
    std::array<int, 4> in_shape_{};
};

}  // namespace uphdr::nn
