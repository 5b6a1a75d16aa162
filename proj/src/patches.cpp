#include "uphdr/patches.hpp"

#include <iostream>

namespace uphdr::data {

std::vector<PatchOffset> patch_grid(int height, int width, int patch, int stride) {
    if (patch < 1 || stride < 1) throw InvalidInputError("patch_grid: patch and stride must be >= 1");
    std::vector<PatchOffset> grid;
    if (height < patch || width < patch) return grid;
    const int rows = (height - patch) / stride + 1;
    const int cols = (width - patch) / stride + 1;
    grid.reserve(static_cast<size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) grid.push_back({r * stride, c * stride});
    return grid;
}

Image crop(const Image& image, int top, int left, int size) {
    if (top < 0 || left < 0 || top + size > image.height || left + size > image.width)
        throw InvalidInputError("crop: window out of bounds");
    Image out(size, size, image.channels);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < image.channels; ++c)
                out.at(y, x, c) = image.at(top + y, left + x, c);
    return out;
}

std::vector<PatchRecord> crop_patches(const Image& image, const std::string& scene_id, int patch,
                                      int stride) {
    auto grid = patch_grid(image.height, image.width, patch, stride);
    if (grid.empty()) {
        std::cerr << "warning: " << scene_id << " (" << image.height << "x" << image.width
                  << ") is smaller than the patch size " << patch << "; no patches produced\n";
        return {};
    }
    std::vector<PatchRecord> out;
    out.reserve(grid.size());
    for (const auto& g : grid)
        out.push_back({crop(image, g.top, g.left, patch), scene_id, g.top, g.left, 0});
    return out;
}

Image apply_dihedral(const Image& image, int aug_id) {
    if (image.height != image.width)
        throw InvalidInputError("apply_dihedral: patch must be square");
    if (aug_id < 0 || aug_id > 7) throw InvalidInputError("apply_dihedral: id must be 0..7");
    const int n = image.height, rot = aug_id & 3;
    const bool flip = aug_id & 4;
    Image out(n, n, image.channels);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            // source coordinates for a 90-degree rotation applied `rot` times
            int sy = y, sx = x;
            for (int r = 0; r < rot; ++r) {
                const int ty = sy;
                sy = n - 1 - sx;
                sx = ty;
            }
            if (flip) sx = n - 1 - sx;
            for (int c = 0; c < image.channels; ++c) out.at(y, x, c) = image.at(sy, sx, c);
        }
    return out;
}

std::vector<PatchRecord> augment_dihedral(const PatchRecord& p) {
    if (p.pixels.height != p.pixels.width)
        throw InvalidInputError("augment_dihedral: patch must be square");
    std::vector<PatchRecord> out;
    out.reserve(8);
    for (int id = 0; id < 8; ++id)
        out.push_back({apply_dihedral(p.pixels, id), p.scene_id, p.top, p.left, id});
    return out;
}

}  // namespace uphdr::data
