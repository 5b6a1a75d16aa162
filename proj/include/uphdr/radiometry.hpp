#pragma once

#include "uphdr/image.hpp"

namespace uphdr::radiometry {

/// Maps an exposure to scene radiance: pixel^gamma / exposure_time.
HdrImage gamma_map(const LdrImage& x, double gamma);

/// Compresses radiance in [0,1] to display range: log(1 + mu*h) / log(1 + mu).
TonemappedImage mu_law_tonemap(const HdrImage& h, double mu = 5000.0);

/// 5x5 Gaussian blur with reflected borders; used to build the blurred
/// fake-image set shown to the discriminator.
HdrImage make_blur_target(const HdrImage& y, double sigma);

/// Scales a raw radiance image by its robust maximum (given percentile of
/// all samples) and clamps to [0,1]. The divisor is recorded in the result's
/// `scale` so the original range can be restored.
HdrImage normalize_hdr(const Image& raw, double percentile = 99.9);

/// The normalized 5x5 kernel used by make_blur_target, row-major.
std::array<double, 25> gaussian_kernel_5x5(double sigma);

/// Scalar form of the mu-law curve.
inline double mu_law(double h, double mu) {
    return std::log1p(mu * h) / std::log1p(mu);
}

}  // namespace uphdr::radiometry
