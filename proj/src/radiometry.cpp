#include "uphdr/radiometry.hpp"

#include <algorithm>
#include <cmath>

namespace uphdr::radiometry {

HdrImage gamma_map(const LdrImage& x, double gamma) {
    x.validate();
    if (!(gamma > 1.0) || !std::isfinite(gamma))
        throw InvalidInputError("gamma_map: gamma must be finite and > 1");
    HdrImage out;
    out.image = Image(x.image.height, x.image.width, x.image.channels);
    const double inv_t = 1.0 / x.exposure_time;
    for (size_t i = 0; i < x.image.size(); ++i)
        out.image.data[i] = std::pow(x.image.data[i], gamma) * inv_t;
    return out;
}

TonemappedImage mu_law_tonemap(const HdrImage& h, double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw InvalidInputError("mu_law_tonemap: mu must be finite and > 0");
    h.validate();
    TonemappedImage out;
    out.image = Image(h.image.height, h.image.width, h.image.channels);
    const double denom = std::log1p(mu);
    for (size_t i = 0; i < h.image.size(); ++i)
        out.image.data[i] = std::log1p(mu * h.image.data[i]) / denom;
    return out;
}

std::array<double, 25> gaussian_kernel_5x5(double sigma) {
    std::array<double, 25> k{};
    double sum = 0.0;
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
            double w = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
            k[(dy + 2) * 5 + (dx + 2)] = w;
            sum += w;
        }
    }
    for (double& w : k) w /= sum;
    return k;
}

namespace {

// BORDER_REFLECT_101 index: the edge sample is not repeated.
int reflect(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

}  // namespace

HdrImage make_blur_target(const HdrImage& y, double sigma) {
    y.validate();
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidInputError("make_blur_target: sigma must be finite and > 0");
    const Image& src = y.image;
    if (src.height < 5 || src.width < 5)
        throw InvalidInputError("make_blur_target: image must be at least 5x5");

    // Separable pass; the product of the normalized 1D kernels equals the
    // normalized 5x5 kernel.
    std::array<double, 5> k1{};
    double sum = 0.0;
    for (int d = -2; d <= 2; ++d) {
        k1[d + 2] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += k1[d + 2];
    }
    for (double& w : k1) w /= sum;

    Image tmp(src.height, src.width, src.channels);
    for (int yy = 0; yy < src.height; ++yy) {
        for (int xx = 0; xx < src.width; ++xx) {
            for (int c = 0; c < src.channels; ++c) {
                double acc = 0.0;
                for (int d = -2; d <= 2; ++d)
                    acc += k1[d + 2] * src.at(yy, reflect(xx + d, src.width), c);
                tmp.at(yy, xx, c) = acc;
            }
        }
    }
    HdrImage out;
    out.image = Image(src.height, src.width, src.channels);
    out.scale = y.scale;
    for (int yy = 0; yy < src.height; ++yy) {
        for (int xx = 0; xx < src.width; ++xx) {
            for (int c = 0; c < src.channels; ++c) {
                double acc = 0.0;
                for (int d = -2; d <= 2; ++d)
                    acc += k1[d + 2] * tmp.at(reflect(yy + d, src.height), xx, c);
                out.image.at(yy, xx, c) = acc;
            }
        }
    }
    return out;
}

HdrImage normalize_hdr(const Image& raw, double percentile) {
    for (double v : raw.data) {
        if (!std::isfinite(v) || v < 0.0)
            throw InvalidInputError("normalize_hdr: pixels must be finite and non-negative");
    }
    if (!(percentile > 0.0 && percentile <= 100.0))
        throw InvalidInputError("normalize_hdr: percentile must be in (0,100]");

    HdrImage out;
    out.image = raw;
    double maxv = raw.max_value();
    if (maxv == 0.0) {
        out.scale = 1.0;  // all-zero image passes through unchanged
        return out;
    }

    std::vector<double> sorted(raw.data);
    size_t rank = static_cast<size_t>(std::ceil(percentile / 100.0 * sorted.size()));
    rank = std::clamp<size_t>(rank, 1, sorted.size());
    std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
    double divisor = sorted[rank - 1];
    if (divisor <= 0.0) divisor = maxv;  // nearly-black image: fall back to the true max

    out.scale = divisor;
    for (double& v : out.image.data) v = std::min(v / divisor, 1.0);
    return out;
}

}  // namespace uphdr::radiometry
