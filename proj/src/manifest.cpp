#include "uphdr/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "uphdr/errors.hpp"
#include "uphdr/image_io.hpp"

namespace uphdr::data {

namespace {

std::string resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path fp(p);
    if (fp.is_absolute()) return fp.string();
    return (base / fp).string();
}

void check_decodable(const std::string& path, const std::string& scene, bool hdr) {
    if (!std::filesystem::exists(path))
        throw SchemaError("manifest: " + scene + " references missing file " + path);
    try {
        if (hdr)
            io::load_hdr_image(path);
        else
            io::load_ldr_image(path);
    } catch (const std::exception& e) {
        throw SchemaError("manifest: " + scene + ": cannot decode " + path + " (" + e.what() + ")");
    }
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SchemaError("manifest not found: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw SchemaError("manifest " + path + ": invalid JSON (" + std::string(e.what()) + ")");
    }

    const auto base = std::filesystem::path(path).parent_path();
    DatasetManifest m;
    if (j.contains("split")) m.split = j.at("split").get<std::string>();

    int idx = 0;
    for (const auto& js : j.value("ldr_scenes", nlohmann::json::array())) {
        LdrSceneEntry e;
        e.id = js.value("id", "scene_" + std::to_string(idx));
        const auto paths = js.value("paths", std::vector<std::string>{});
        const auto times = js.value("exposure_times", std::vector<double>{});
        if (paths.size() != 3)
            throw SchemaError("manifest: " + e.id + " must list exactly 3 exposures, got " +
                              std::to_string(paths.size()));
        if (times.size() != 3)
            throw SchemaError("manifest: " + e.id + " must list exactly 3 exposure times");
        for (int i = 0; i < 3; ++i) {
            e.paths[i] = resolve(base, paths[i]);
            e.exposure_times[i] = times[i];
            if (!(times[i] > 0.0))
                throw SchemaError("manifest: " + e.id + " has non-positive exposure time");
        }
        if (!(times[0] < times[1] && times[1] < times[2]))
            throw SchemaError("manifest: " + e.id + " exposure times must be strictly increasing");
        for (const auto& p : e.paths) check_decodable(p, e.id, false);
        if (js.contains("gt")) {
            e.ground_truth = resolve(base, js.at("gt").get<std::string>());
            check_decodable(*e.ground_truth, e.id, true);
        }
        m.ldr_scenes.push_back(std::move(e));
        ++idx;
    }

    for (const auto& jt : j.value("hdr_targets", nlohmann::json::array())) {
        std::string p = resolve(base, jt.get<std::string>());
        check_decodable(p, "hdr_targets", true);
        m.hdr_targets.push_back(std::move(p));
    }
    return m;
}

}  // namespace uphdr::data
