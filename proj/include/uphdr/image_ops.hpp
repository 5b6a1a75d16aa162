#pragma once

#include "uphdr/image.hpp"

namespace uphdr {

/// Bilinear resize (align-corners=false convention).
Image resize_bilinear(const Image& src, int out_h, int out_w);

/// Mirror left-right.
Image flip_horizontal(const Image& src);

}  // namespace uphdr
