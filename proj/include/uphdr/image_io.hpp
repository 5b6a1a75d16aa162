#pragma once

#include <string>

#include "uphdr/image.hpp"

namespace uphdr::io {

/// Reads an 8- or 16-bit PNG/JPEG as sRGB-encoded values scaled to [0,1].
Image load_ldr_image(const std::string& path);

/// Reads a Radiance .hdr or PFM file as raw linear radiance (RGB).
Image load_hdr_image(const std::string& path);

/// Loads any supported format, dispatching on the file extension.
Image load_image(const std::string& path);

/// Writes an 8-bit PNG; values are clamped to [0,1].
void save_png(const std::string& path, const Image& img);

/// Writes a 16-bit PNG; values are clamped to [0,1].
void save_png16(const std::string& path, const Image& img);

/// Little-endian float32 PFM ("PF" header, bottom-up scanlines).
void save_pfm(const std::string& path, const Image& img);
Image load_pfm(const std::string& path);

bool has_extension(const std::string& path, const char* ext);

}  // namespace uphdr::io
