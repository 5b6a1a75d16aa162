#pragma once

#include "uphdr/image.hpp"

namespace uphdr::eval {

/// 10*log10(1/MSE) for images in [0,1]; identical images return `cap`.
double psnr(const Image& a, const Image& b, double cap = 99.0);

/// Mean local SSIM with an 11x11 Gaussian window (sigma 1.5), K1=0.01,
/// K2=0.03, dynamic range 1. Windows are fully interior (valid mode).
double ssim(const Image& a, const Image& b);

double mse(const Image& a, const Image& b);

}  // namespace uphdr::eval
