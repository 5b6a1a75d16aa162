#include "uphdr/feature_bank.hpp"

#include <filesystem>

#include "uphdr/container.hpp"
#include "uphdr/errors.hpp"

namespace uphdr {

nn::FeatureExtractor<float> make_feature_extractor(const TrainConfig& config) {
    if (config.features_preset == "tiny") return nn::FeatureExtractor<float>::tiny();

    const std::string& path = config.features_weights;
    if (path.empty() || !std::filesystem::exists(path)) {
        throw ConfigError(
            "feature extractor weights not found at '" + path +
            "'.\n"
            "The vgg19 preset needs a converted classifier archive. Produce one with\n"
            "    python tools/export_vgg19.py --out " + (path.empty() ? "vgg19_conv4_4.bin" : path) +
            "\n(requires torchvision). The script prints the archive's SHA-256; the hash\n"
            "is also recorded in the run log at training time. For runs without the\n"
            "classifier, set features.preset = \"tiny\".");
    }
    std::vector<NamedArray> arrays;
    ArchiveMeta meta;
    read_archive(path, arrays, meta);
    return nn::FeatureExtractor<float>::vgg19(arrays);
}

}  // namespace uphdr
