#pragma once

#include <cmath>
#include <utility>

#include "uphdr/features.hpp"
#include "uphdr/networks.hpp"

namespace uphdr::loss {

using nn::Discriminator;
using nn::FeatureExtractor;
using nn::Tensor;

/// Per-step scalar summary written to the training log.
struct LossReport {
    int epoch = 0;
    int step = 0;
    double d_loss = 0.0;
    double g_adv = 0.0;
    double g_content = 0.0;
    double w_con = 0.0;
    double g_total = 0.0;
};

/// Content-weight staircase: w0 * 0.96^floor(epoch/10).
inline double content_weight(int epoch, double w0 = 1.5) {
    if (epoch < 0) throw InvalidInputError("content_weight: epoch must be >= 0");
    return w0 * std::pow(0.96, epoch / 10);
}

/// g_adv + w_con * g_content, guarding against divergence.
inline double total_generator_loss(double g_adv, double g_content, double w_con) {
    if (!std::isfinite(g_adv) || !std::isfinite(g_content) || !std::isfinite(w_con))
        throw DivergenceError("total_generator_loss: non-finite term (g_adv=" +
                              std::to_string(g_adv) + ", g_content=" + std::to_string(g_content) +
                              ", w_con=" + std::to_string(w_con) + ")");
    return g_adv + w_con * g_content;
}

namespace detail {

template <typename T>
T softplus(T x) {
    // log(1 + e^x) without overflow
    return std::max(x, T(0)) + std::log1p(std::exp(-std::abs(x)));
}

template <typename T>
T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

}  // namespace detail

/// Mean of -log(sigmoid(z)): the "classify as real" BCE term on raw scores.
template <typename T>
T bce_real_mean(const Tensor<T>& scores) {
    T acc = T(0);
    for (T z : scores.v) acc += detail::softplus(-z);
    return acc / static_cast<T>(scores.size());
}

/// Mean of -log(1 - sigmoid(z)): the "classify as fake" BCE term.
template <typename T>
T bce_fake_mean(const Tensor<T>& scores) {
    T acc = T(0);
    for (T z : scores.v) acc += detail::softplus(z);
    return acc / static_cast<T>(scores.size());
}

template <typename T>
Tensor<T> bce_real_grad(const Tensor<T>& scores) {
    Tensor<T> g(scores.n, scores.h, scores.w, scores.c);
    const T inv = T(1) / static_cast<T>(scores.size());
    for (size_t i = 0; i < scores.size(); ++i)
        g.v[i] = (detail::sigmoid(scores.v[i]) - T(1)) * inv;
    return g;
}

template <typename T>
Tensor<T> bce_fake_grad(const Tensor<T>& scores) {
    Tensor<T> g(scores.n, scores.h, scores.w, scores.c);
    const T inv = T(1) / static_cast<T>(scores.size());
    for (size_t i = 0; i < scores.size(); ++i)
        g.v[i] = detail::sigmoid(scores.v[i]) * inv;
    return g;
}

/// Three-term discriminator objective: real HDR targets score real; the
/// generator output and the blurred targets both score fake. Pass nullptr
/// for `b_tm` to drop the blur term (ablation).
/// Value only; see discriminator_objective_backward for the training path.
template <typename T>
T discriminator_objective(Discriminator<T>& d, const Tensor<T>& y_tm, const Tensor<T>& g_tm,
                          const Tensor<T>* b_tm, bool train = true) {
    if (!y_tm.same_shape(g_tm) || (b_tm && !b_tm->same_shape(y_tm)))
        throw ShapeError("discriminator_objective: image shapes differ");
    T v = bce_real_mean(d.forward(y_tm, train));
    v += bce_fake_mean(d.forward(g_tm, train));
    if (b_tm) v += bce_fake_mean(d.forward(*b_tm, train));
    return v;
}

/// Training path: evaluates the objective and accumulates discriminator
/// parameter gradients (forward/backward per term, so batch-norm caches
/// stay consistent).
template <typename T>
T discriminator_objective_backward(Discriminator<T>& d, const Tensor<T>& y_tm,
                                   const Tensor<T>& g_tm, const Tensor<T>* b_tm) {
    if (!y_tm.same_shape(g_tm) || (b_tm && !b_tm->same_shape(y_tm)))
        throw ShapeError("discriminator_objective: image shapes differ");
    auto sy = d.forward(y_tm, true);
    T v = bce_real_mean(sy);
    d.backward(bce_real_grad(sy), true);
    auto sg = d.forward(g_tm, true);
    v += bce_fake_mean(sg);
    d.backward(bce_fake_grad(sg), true);
    if (b_tm) {
        auto sb = d.forward(*b_tm, true);
        v += bce_fake_mean(sb);
        d.backward(bce_fake_grad(sb), true);
    }
    return v;
}

/// Generator adversarial objective: -E[log sigmoid(F_pool)] where F_pool is
/// the min-pooled raw score map (window <= 1 disables pooling). Minimizing
/// this pushes the worst-scoring window of each region toward "real".
template <typename T>
T generator_adversarial_objective(Discriminator<T>& d, const Tensor<T>& g_tm, int window,
                                  bool train = true) {
    auto f = d.forward(g_tm, train);
    if (window > 1) return bce_real_mean(nn::min_pool(f, window).pooled);
    return bce_real_mean(f);
}

/// Training path: returns the loss and its gradient w.r.t. g_tm. When
/// `update_d_params` is false (the G step) discriminator gradients are not
/// accumulated — D is frozen for this evaluation.
template <typename T>
std::pair<T, Tensor<T>> generator_adversarial_backward(Discriminator<T>& d, const Tensor<T>& g_tm,
                                                       int window, bool update_d_params = false) {
    auto f = d.forward(g_tm, true);
    T v;
    Tensor<T> df;
    if (window > 1) {
        auto mp = nn::min_pool(f, window);
        v = bce_real_mean(mp.pooled);
        df = nn::min_pool_backward(mp, bce_real_grad(mp.pooled));
    } else {
        v = bce_real_mean(f);
        df = bce_real_grad(f);
    }
    return {v, d.backward(df, update_d_params)};
}

/// Perceptual content loss: mean absolute difference between extractor
/// features of the tonemapped output and of the reference exposure.
template <typename T>
T content_loss(FeatureExtractor<T>& fe, const Tensor<T>& g_tm, const Tensor<T>& reference) {
    if (!g_tm.same_shape(reference)) throw ShapeError("content_loss: image shapes differ");
    auto fg = fe.forward(g_tm, false);
    auto fr = fe.forward(reference, false);
    T acc = T(0);
    for (size_t i = 0; i < fg.size(); ++i) acc += std::abs(fg.v[i] - fr.v[i]);
    return acc / static_cast<T>(fg.size());
}

/// Training path: loss plus gradient w.r.t. g_tm (reference is data).
template <typename T>
std::pair<T, Tensor<T>> content_loss_backward(FeatureExtractor<T>& fe, const Tensor<T>& g_tm,
                                              const Tensor<T>& reference) {
    if (!g_tm.same_shape(reference)) throw ShapeError("content_loss: image shapes differ");
    auto fr = fe.forward(reference, false);
    auto fg = fe.forward(g_tm, true);
    T acc = T(0);
    Tensor<T> dfeat(fg.n, fg.h, fg.w, fg.c);
    const T inv = T(1) / static_cast<T>(fg.size());
    for (size_t i = 0; i < fg.size(); ++i) {
        const T dlt = fg.v[i] - fr.v[i];
        acc += std::abs(dlt);
        dfeat.v[i] = (dlt > T(0) ? inv : (dlt < T(0) ? -inv : T(0)));
    }
    return {acc * inv, fe.backward(dfeat)};
}

/// Mean squared pixel difference (content-loss ablation).
template <typename T>
T content_loss_mse(const Tensor<T>& g_tm, const Tensor<T>& reference) {
    if (!g_tm.same_shape(reference)) throw ShapeError("content_loss_mse: image shapes differ");
    T acc = T(0);
    for (size_t i = 0; i < g_tm.size(); ++i) {
        const T d = g_tm.v[i] - reference.v[i];
        acc += d * d;
    }
    return acc / static_cast<T>(g_tm.size());
}

template <typename T>
std::pair<T, Tensor<T>> content_loss_mse_backward(const Tensor<T>& g_tm,
                                                  const Tensor<T>& reference) {
    if (!g_tm.same_shape(reference)) throw ShapeError("content_loss_mse: image shapes differ");
    T acc = T(0);
    Tensor<T> dg(g_tm.n, g_tm.h, g_tm.w, g_tm.c);
    const T inv = T(1) / static_cast<T>(g_tm.size());
    for (size_t i = 0; i < g_tm.size(); ++i) {
        const T d = g_tm.v[i] - reference.v[i];
        acc += d * d;
        dg.v[i] = T(2) * d * inv;
    }
    return {acc * inv, dg};
}

}  // namespace uphdr::loss
