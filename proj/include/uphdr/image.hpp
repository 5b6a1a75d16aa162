#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "uphdr/errors.hpp"

namespace uphdr {

/// Interleaved row-major image buffer (double precision, HWC).
struct Image {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    Image() = default;
    Image(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c), data(static_cast<size_t>(h) * w * c, fill) {}

    size_t size() const { return data.size(); }

    double& at(int y, int x, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    bool same_shape(const Image& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double max_value() const {
        double m = 0.0;
        for (double v : data) m = std::max(m, v);
        return m;
    }
};

/// One exposure of a bracketed stack: display-referred pixels in [0,1]
/// plus the exposure time in seconds.
struct LdrImage {
    Image image;
    double exposure_time = 1.0;

    void validate() const {
        if (!(exposure_time > 0.0) || !std::isfinite(exposure_time))
            throw InvalidInputError("LdrImage: exposure time must be positive and finite");
        for (double v : image.data) {
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                throw InvalidInputError("LdrImage: pixel values must be finite and in [0,1]");
        }
    }
};

/// Linear-radiance image. `scale` is the factor divided out by
/// normalize_hdr so the original range can be restored for display.
struct HdrImage {
    Image image;
    double scale = 1.0;

    void validate() const {
        for (double v : image.data) {
            if (!std::isfinite(v) || v < 0.0)
                throw InvalidInputError("HdrImage: pixel values must be finite and non-negative");
        }
    }
};

/// Display-ready result of the mu-law compression, in [0,1] whenever the
/// source radiance was in [0,1].
struct TonemappedImage {
    Image image;
};

/// Three exposures ordered by increasing exposure time.
struct ExposureStack {
    std::array<LdrImage, 3> exposures;
};

}  // namespace uphdr
