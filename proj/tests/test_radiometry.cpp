#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "uphdr/radiometry.hpp"

using namespace uphdr;
using namespace uphdr::radiometry;

namespace {

Image random_image(int h, int w, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Image img(h, w, 3);
    for (double& v : img.data) v = u(rng);
    return img;
}

}  // namespace

TEST_CASE("gamma_map closed form") {
    LdrImage x;
    x.image = Image(1, 3, 3);
    x.exposure_time = 2.0;
    x.image.at(0, 0, 0) = 0.0;
    x.image.at(0, 1, 0) = 0.5;
    x.image.at(0, 2, 0) = 1.0;

    auto h = gamma_map(x, 2.0);
    CHECK(h.image.at(0, 0, 0) == doctest::Approx(0.0));
    CHECK(h.image.at(0, 1, 0) == doctest::Approx(0.125).epsilon(1e-12));  // 0.25 / 2
    CHECK(h.image.at(0, 2, 0) == doctest::Approx(0.5).epsilon(1e-12));

    x.exposure_time = 1.0;
    auto h2 = gamma_map(x, 2.2);
    CHECK(h2.image.at(0, 2, 0) == doctest::Approx(1.0).epsilon(1e-12));  // unit fixed point
    CHECK(h2.image.at(0, 0, 0) == 0.0);
}

TEST_CASE("gamma_map rejects bad inputs") {
    LdrImage x;
    x.image = Image(2, 2, 3, 0.5);
    x.exposure_time = 0.0;
    CHECK_THROWS_AS(gamma_map(x, 2.2), InvalidInputError);
    x.exposure_time = 1.0;
    CHECK_THROWS_AS(gamma_map(x, 1.0), InvalidInputError);  // gamma must exceed 1
    x.image.at(0, 0, 0) = std::nan("");
    CHECK_THROWS_AS(gamma_map(x, 2.2), InvalidInputError);
    x.image.at(0, 0, 0) = 1.5;
    CHECK_THROWS_AS(gamma_map(x, 2.2), InvalidInputError);
}

TEST_CASE("gamma_map strictly increasing in pixel value") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        double a = u(rng), b = u(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        LdrImage x;
        x.image = Image(1, 2, 3);
        x.exposure_time = 0.5 + u(rng);
        for (int c = 0; c < 3; ++c) {
            x.image.at(0, 0, c) = a;
            x.image.at(0, 1, c) = b;
        }
        auto h = gamma_map(x, 1.1 + 2.0 * u(rng));
        CHECK(h.image.at(0, 0, 0) < h.image.at(0, 1, 0));
    }
}

TEST_CASE("mu_law closed form and range") {
    HdrImage h;
    h.image = Image(1, 3, 3);
    h.image.at(0, 0, 0) = 0.0;
    h.image.at(0, 1, 0) = 0.5;
    h.image.at(0, 2, 0) = 1.0;
    auto t = mu_law_tonemap(h, 5000.0);
    CHECK(t.image.at(0, 0, 0) == doctest::Approx(0.0));
    CHECK(t.image.at(0, 2, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.image.at(0, 1, 0) ==
          doctest::Approx(std::log(2501.0) / std::log(5001.0)).epsilon(1e-12));  // ~0.91866
    CHECK(t.image.at(0, 1, 0) == doctest::Approx(0.91866).epsilon(1e-4));
}

TEST_CASE("mu_law monotone and bounded on [0,1]") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double prev = -1.0;
    std::vector<double> vals(500);
    for (auto& v : vals) v = u(rng);
    std::sort(vals.begin(), vals.end());
    HdrImage h;
    h.image = Image(1, static_cast<int>(vals.size()), 1);
    h.image.channels = 1;
    for (size_t i = 0; i < vals.size(); ++i) h.image.data[i] = vals[i];
    auto t = mu_law_tonemap(h, 5000.0);
    for (size_t i = 0; i < vals.size(); ++i) {
        CHECK(t.image.data[i] >= 0.0);
        CHECK(t.image.data[i] <= 1.0);
        if (i && vals[i] > vals[i - 1]) CHECK(t.image.data[i] > prev);
        prev = t.image.data[i];
    }

    h.image.data[0] = -0.1;
    CHECK_THROWS_AS(mu_law_tonemap(h, 5000.0), InvalidInputError);
}

TEST_CASE("blur target: constant image is a fixed point") {
    HdrImage y;
    y.image = Image(9, 9, 3, 0.37);
    auto b = make_blur_target(y, 1.0);
    for (double v : b.image.data) CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("blur target: impulse recovers the kernel") {
    HdrImage y;
    y.image = Image(11, 11, 1);
    y.image.channels = 1;
    y.image.data.assign(121, 0.0);
    y.image.at(5, 5, 0) = 1.0;
    auto b = make_blur_target(y, 1.0);
    auto k = gaussian_kernel_5x5(1.0);
    for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx)
            CHECK(b.image.at(5 + dy, 5 + dx, 0) ==
                  doctest::Approx(k[(dy + 2) * 5 + (dx + 2)]).epsilon(1e-12));
    // off-kernel support stays zero
    CHECK(b.image.at(0, 0, 0) == 0.0);
    CHECK(b.image.at(5, 0, 0) == 0.0);
}

TEST_CASE("blur target: smoothing does not increase variance, range preserved") {
    std::mt19937_64 rng(5);
    HdrImage y;
    y.image = random_image(24, 31, rng);
    auto b = make_blur_target(y, 1.0);
    for (int c = 0; c < 3; ++c) {
        auto stats = [&](const Image& img) {
            double mean = 0, var = 0;
            const int n = img.height * img.width;
            for (int yy = 0; yy < img.height; ++yy)
                for (int xx = 0; xx < img.width; ++xx) mean += img.at(yy, xx, c);
            mean /= n;
            for (int yy = 0; yy < img.height; ++yy)
                for (int xx = 0; xx < img.width; ++xx) {
                    const double d = img.at(yy, xx, c) - mean;
                    var += d * d;
                }
            return var / n;
        };
        CHECK(stats(b.image) <= stats(y.image) + 1e-12);
    }
    const double in_max = y.image.max_value();
    for (double v : b.image.data) {
        CHECK(v >= 0.0);
        CHECK(v <= in_max + 1e-12);
    }
}

TEST_CASE("blur target commutes with horizontal flip") {
    std::mt19937_64 rng(6);
    HdrImage y;
    y.image = random_image(16, 20, rng);

    HdrImage flipped;
    flipped.image = Image(16, 20, 3);
    for (int yy = 0; yy < 16; ++yy)
        for (int xx = 0; xx < 20; ++xx)
            for (int c = 0; c < 3; ++c) flipped.image.at(yy, xx, c) = y.image.at(yy, 19 - xx, c);

    auto a = make_blur_target(flipped, 1.0);
    auto b = make_blur_target(y, 1.0);
    for (int yy = 0; yy < 16; ++yy)
        for (int xx = 0; xx < 20; ++xx)
            for (int c = 0; c < 3; ++c)
                CHECK(a.image.at(yy, xx, c) == b.image.at(yy, 19 - xx, c));  // exact
}

TEST_CASE("blur target rejects tiny images and bad sigma") {
    HdrImage y;
    y.image = Image(4, 8, 3, 0.1);
    CHECK_THROWS_AS(make_blur_target(y, 1.0), InvalidInputError);
    y.image = Image(8, 8, 3, 0.1);
    CHECK_THROWS_AS(make_blur_target(y, 0.0), InvalidInputError);
}

TEST_CASE("normalize_hdr matches the sort-based percentile oracle") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Image raw = random_image(15, 17, rng, 0.0, 8.0);
        auto h = normalize_hdr(raw, 99.9);
        const double oracle = oracle::percentile_sorted(raw.data, 99.9);
        CHECK(h.scale == doctest::Approx(oracle).epsilon(1e-9));
        for (size_t i = 0; i < raw.data.size(); ++i)
            CHECK(h.image.data[i] ==
                  doctest::Approx(std::min(raw.data[i] / oracle, 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("normalize_hdr edge cases") {
    Image zeros(6, 6, 3, 0.0);
    auto h = normalize_hdr(zeros, 99.9);
    CHECK(h.scale == 1.0);
    for (double v : h.image.data) CHECK(v == 0.0);

    // already normalized with max exactly 1: unchanged up to the percentile
    std::mt19937_64 rng(8);
    Image unit = random_image(20, 20, rng);
    unit.data[0] = 1.0;

    // scale invariance: x and 10x normalize identically
    Image scaled = unit;
    for (double& v : scaled.data) v *= 10.0;
    auto a = normalize_hdr(unit, 99.9);
    auto c = normalize_hdr(scaled, 99.9);
    for (size_t i = 0; i < unit.data.size(); ++i)
        CHECK(a.image.data[i] == doctest::Approx(c.image.data[i]).epsilon(1e-12));

    Image neg(4, 4, 3, -1.0);
    CHECK_THROWS_AS(normalize_hdr(neg, 99.9), InvalidInputError);
}
