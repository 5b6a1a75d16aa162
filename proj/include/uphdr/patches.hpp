#pragma once

#include <array>
#include <string>
#include <vector>

#include "uphdr/image.hpp"

namespace uphdr::data {

struct PatchOffset {
    int top = 0;
    int left = 0;
};

/// A crop with its provenance: source scene, grid offset, and which of the
/// 8 dihedral transforms was applied (0 = identity).
struct PatchRecord {
    Image pixels;
    std::string scene_id;
    int top = 0;
    int left = 0;
    int augmentation_id = 0;
};

/// All top-left offsets of patch-sized crops on the stride grid
/// ((floor((H-P)/S)+1) x (floor((W-P)/S)+1) of them); empty if the image
/// is smaller than the patch.
std::vector<PatchOffset> patch_grid(int height, int width, int patch, int stride);

/// Crops every grid patch. Images smaller than the patch produce an empty
/// list and a warning on stderr.
std::vector<PatchRecord> crop_patches(const Image& image, const std::string& scene_id,
                                      int patch = 256, int stride = 64);

Image crop(const Image& image, int top, int left, int size);

/// Applies dihedral transform `aug_id` in 0..7: rotate by 90 degrees
/// (aug_id & 3) times, then mirror horizontally if bit 2 is set.
/// Requires a square image.
Image apply_dihedral(const Image& image, int aug_id);

/// The full 8-element orbit of a square patch, augmentation_id 0..7.
std::vector<PatchRecord> augment_dihedral(const PatchRecord& p);

}  // namespace uphdr::data
