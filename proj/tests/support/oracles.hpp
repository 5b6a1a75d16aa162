#pragma once

// Independent brute-force references used by the unit and acceptance
// suites. These deliberately avoid the implementation paths they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "uphdr/image.hpp"
#include "uphdr/nn/tensor.hpp"

namespace oracle {

/// Sort-based percentile: value at rank ceil(q/100 * N) (1-based).
inline double percentile_sorted(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    size_t rank = static_cast<size_t>(std::ceil(q / 100.0 * v.size()));
    rank = std::clamp<size_t>(rank, 1, v.size());
    return v[rank - 1];
}

/// Nested-loop window minimum.
template <typename T>
uphdr::nn::Tensor<T> min_pool_bruteforce(const uphdr::nn::Tensor<T>& f, int window) {
    uphdr::nn::Tensor<T> out(f.n, f.h / window, f.w / window, f.c);
    for (int n = 0; n < f.n; ++n)
        for (int oy = 0; oy < out.h; ++oy)
            for (int ox = 0; ox < out.w; ++ox)
                for (int c = 0; c < f.c; ++c) {
                    T m = f.at(n, oy * window, ox * window, c);
                    for (int dy = 0; dy < window; ++dy)
                        for (int dx = 0; dx < window; ++dx)
                            m = std::min(m, f.at(n, oy * window + dy, ox * window + dx, c));
                    out.at(n, oy, ox, c) = m;
                }
    return out;
}

/// All valid top-left offsets by direct enumeration.
inline std::vector<std::pair<int, int>> patch_offsets_bruteforce(int h, int w, int p, int s) {
    std::vector<std::pair<int, int>> out;
    for (int y = 0; y + p <= h; y += s)
        for (int x = 0; x + p <= w; x += s) out.emplace_back(y, x);
    return out;
}

/// Per-window SSIM evaluated directly from the definition (no separable
/// filtering): Gaussian-weighted moments inside each fully interior 11x11
/// window, averaged over windows and channels.
inline double ssim_reference(const uphdr::Image& a, const uphdr::Image& b) {
    constexpr int win = 11;
    const double sigma = 1.5, c1 = 1e-4, c2 = 9e-4;
    double wsum = 0.0;
    double weights[win][win];
    for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) {
            const double dy = i - 5.0, dx = j - 5.0;
            weights[i][j] = std::exp(-(dy * dy + dx * dx) / (2 * sigma * sigma));
            wsum += weights[i][j];
        }
    for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) weights[i][j] /= wsum;

    double total = 0.0;
    size_t count = 0;
    for (int ch = 0; ch < a.channels; ++ch)
        for (int y = 0; y + win <= a.height; ++y)
            for (int x = 0; x + win <= a.width; ++x) {
                double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
                for (int i = 0; i < win; ++i)
                    for (int j = 0; j < win; ++j) {
                        const double va = a.at(y + i, x + j, ch), vb = b.at(y + i, x + j, ch);
                        ma += weights[i][j] * va;
                        mb += weights[i][j] * vb;
                        maa += weights[i][j] * va * va;
                        mbb += weights[i][j] * vb * vb;
                        mab += weights[i][j] * va * vb;
                    }
                const double var_a = maa - ma * ma, var_b = mbb - mb * mb, cov = mab - ma * mb;
                total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                         ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
                ++count;
            }
    return total / static_cast<double>(count);
}

/// Central finite differences of a scalar function w.r.t. a tensor.
template <typename T>
uphdr::nn::Tensor<T> finite_difference(uphdr::nn::Tensor<T>& x,
                                       const std::function<T()>& eval, T h) {
    uphdr::nn::Tensor<T> g(x.n, x.h, x.w, x.c);
    for (size_t i = 0; i < x.size(); ++i) {
        const T keep = x.v[i];
        x.v[i] = keep + h;
        const T up = eval();
        x.v[i] = keep - h;
        const T dn = eval();
        x.v[i] = keep;
        g.v[i] = (up - dn) / (2 * h);
    }
    return g;
}

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor)
template <typename T>
double max_relative_error(const uphdr::nn::Tensor<T>& a, const uphdr::nn::Tensor<T>& b,
                          double floor = 1e-6) {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double da = a.v[i], db = b.v[i];
        const double denom = std::max({std::abs(da), std::abs(db), floor});
        worst = std::max(worst, std::abs(da - db) / denom);
    }
    return worst;
}

}  // namespace oracle
