#include "uphdr/metrics.hpp"

#include <array>
#include <cmath>

namespace uphdr::eval {

double mse(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw ShapeError("mse: image shapes differ");
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double psnr(const Image& a, const Image& b, double cap) {
    const double m = mse(a, b);
    if (m == 0.0) return cap;
    return std::min(10.0 * std::log10(1.0 / m), cap);
}

namespace {

constexpr int kWin = 11;

std::array<double, kWin> gaussian_window() {
    std::array<double, kWin> w{};
    const double sigma = 1.5;
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i) {
        const double d = i - (kWin - 1) / 2.0;
        w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += w[i];
    }
    for (double& x : w) x /= sum;
    return w;
}

// Separable Gaussian filter, valid region only: output is
// (h-10) x (w-10) per channel.
void filter_valid(const Image& src, int ch, const std::array<double, kWin>& k,
                  std::vector<double>& out, int& oh, int& ow) {
    const int h = src.height, w = src.width;
    oh = h - kWin + 1;
    ow = w - kWin + 1;
    std::vector<double> tmp(static_cast<size_t>(h) * ow);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < kWin; ++i) acc += k[i] * src.at(y, x + i, ch);
            tmp[static_cast<size_t>(y) * ow + x] = acc;
        }
    out.assign(static_cast<size_t>(oh) * ow, 0.0);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < kWin; ++i) acc += k[i] * tmp[static_cast<size_t>(y + i) * ow + x];
            out[static_cast<size_t>(y) * ow + x] = acc;
        }
}

}  // namespace

double ssim(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw ShapeError("ssim: image shapes differ");
    if (a.height < kWin || a.width < kWin)
        throw InvalidInputError("ssim: image smaller than the 11x11 window");

    const auto k = gaussian_window();
    constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;

    Image aa(a.height, a.width, a.channels), bb = aa, ab = aa;
    for (size_t i = 0; i < a.size(); ++i) {
        aa.data[i] = a.data[i] * a.data[i];
        bb.data[i] = b.data[i] * b.data[i];
        ab.data[i] = a.data[i] * b.data[i];
    }

    double total = 0.0;
    size_t count = 0;
    std::vector<double> mu_a, mu_b, m_aa, m_bb, m_ab;
    for (int ch = 0; ch < a.channels; ++ch) {
        int oh = 0, ow = 0;
        filter_valid(a, ch, k, mu_a, oh, ow);
        filter_valid(b, ch, k, mu_b, oh, ow);
        filter_valid(aa, ch, k, m_aa, oh, ow);
        filter_valid(bb, ch, k, m_bb, oh, ow);
        filter_valid(ab, ch, k, m_ab, oh, ow);
        for (size_t i = 0; i < mu_a.size(); ++i) {
            const double va = m_aa[i] - mu_a[i] * mu_a[i];
            const double vb = m_bb[i] - mu_b[i] * mu_b[i];
            const double cov = m_ab[i] - mu_a[i] * mu_b[i];
            const double num = (2 * mu_a[i] * mu_b[i] + c1) * (2 * cov + c2);
            const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2);
            total += num / den;
        }
        count += mu_a.size();
    }
    return total / static_cast<double>(count);
}

}  // namespace uphdr::eval
