#include "uphdr/checkpoint.hpp"

#include <cstring>

#include "uphdr/container.hpp"
#include "uphdr/errors.hpp"

namespace uphdr::train {

namespace {

NamedArray pack(const std::string& name, const std::vector<float>& v,
                std::vector<int64_t> shape = {}) {
    NamedArray a;
    a.name = name;
    a.dtype = "f4";
    a.shape = shape.empty() ? std::vector<int64_t>{static_cast<int64_t>(v.size())} : shape;
    a.bytes.resize(v.size() * sizeof(float));
    std::memcpy(a.bytes.data(), v.data(), a.bytes.size());
    return a;
}

void unpack(const NamedArray& a, std::vector<float>& dst) {
    if (a.dtype != "f4") throw ConfigError("checkpoint: expected f4 array for " + a.name);
    if (a.bytes.size() != dst.size() * sizeof(float))
        throw ConfigError("checkpoint: size mismatch for " + a.name + " (got " +
                          std::to_string(a.bytes.size() / sizeof(float)) + " values, expected " +
                          std::to_string(dst.size()) + ")");
    std::memcpy(dst.data(), a.bytes.data(), a.bytes.size());
}

const NamedArray& find(const std::vector<NamedArray>& arrays, const std::string& name) {
    for (const auto& a : arrays)
        if (a.name == name) return a;
    throw ConfigError("checkpoint: missing array " + name);
}

std::vector<NamedArray> snapshot(const nn::Generator<float>& gen,
                                 const nn::Discriminator<float>& disc, nn::Adam<float>& opt_g,
                                 nn::Adam<float>& opt_d) {
    std::vector<NamedArray> arrays;
    for (const auto& p : gen.params()) arrays.push_back(pack(p.name, p.value->v));
    for (const auto& b : gen.buffers()) arrays.push_back(pack(b.name, b.value->v));
    for (const auto& p : disc.params()) arrays.push_back(pack(p.name, p.value->v));
    for (const auto& b : disc.buffers()) arrays.push_back(pack(b.name, b.value->v));
    const auto& pg = opt_g.params();
    for (size_t i = 0; i < pg.size(); ++i) {
        arrays.push_back(pack("adam_g.m." + pg[i].name, opt_g.first_moments()[i]));
        arrays.push_back(pack("adam_g.v." + pg[i].name, opt_g.second_moments()[i]));
    }
    const auto& pd = opt_d.params();
    for (size_t i = 0; i < pd.size(); ++i) {
        arrays.push_back(pack("adam_d.m." + pd[i].name, opt_d.first_moments()[i]));
        arrays.push_back(pack("adam_d.v." + pd[i].name, opt_d.second_moments()[i]));
    }
    return arrays;
}

}  // namespace

void save_checkpoint(const std::string& path, const nn::Generator<float>& gen,
                     const nn::Discriminator<float>& disc, nn::Adam<float>& opt_g,
                     nn::Adam<float>& opt_d, const CheckpointMeta& meta) {
    ArchiveMeta m;
    m["epoch"] = std::to_string(meta.epoch);
    m["step"] = std::to_string(meta.step);
    m["config_hash"] = meta.config_hash;
    m["config_toml"] = meta.config_toml;
    m["rng_state"] = meta.rng_state;
    m["features_sha256"] = meta.features_sha256;
    m["adam_g.t"] = std::to_string(opt_g.step_count());
    m["adam_d.t"] = std::to_string(opt_d.step_count());
    write_archive(path, snapshot(gen, disc, opt_g, opt_d), m);
}

CheckpointMeta peek_checkpoint(const std::string& path) {
    std::vector<NamedArray> arrays;
    ArchiveMeta m;
    read_archive(path, arrays, m);
    CheckpointMeta meta;
    meta.epoch = std::stoi(m.at("epoch"));
    meta.step = std::stoll(m.at("step"));
    meta.config_hash = m.at("config_hash");
    meta.config_toml = m.at("config_toml");
    meta.rng_state = m.at("rng_state");
    meta.features_sha256 = m.at("features_sha256");
    return meta;
}

CheckpointMeta load_checkpoint(const std::string& path, nn::Generator<float>& gen,
                               nn::Discriminator<float>& disc, nn::Adam<float>& opt_g,
                               nn::Adam<float>& opt_d, const std::string& expected_config_hash,
                               bool force) {
    std::vector<NamedArray> arrays;
    ArchiveMeta m;
    read_archive(path, arrays, m);

    CheckpointMeta meta;
    meta.epoch = std::stoi(m.at("epoch"));
    meta.step = std::stoll(m.at("step"));
    meta.config_hash = m.at("config_hash");
    meta.config_toml = m.at("config_toml");
    meta.rng_state = m.at("rng_state");
    meta.features_sha256 = m.at("features_sha256");

    if (!force && meta.config_hash != expected_config_hash)
        throw ConfigError("checkpoint " + path +
                          " was written with a different config (hash " + meta.config_hash +
                          " vs " + expected_config_hash + "); pass --force to resume anyway");

    for (auto& p : gen.params()) unpack(find(arrays, p.name), p.value->v);
    for (auto& b : gen.buffers()) unpack(find(arrays, b.name), b.value->v);
    for (auto& p : disc.params()) unpack(find(arrays, p.name), p.value->v);
    for (auto& b : disc.buffers()) unpack(find(arrays, b.name), b.value->v);
    const auto& pg = opt_g.params();
    for (size_t i = 0; i < pg.size(); ++i) {
        unpack(find(arrays, "adam_g.m." + pg[i].name), opt_g.first_moments()[i]);
        unpack(find(arrays, "adam_g.v." + pg[i].name), opt_g.second_moments()[i]);
    }
    const auto& pd = opt_d.params();
    for (size_t i = 0; i < pd.size(); ++i) {
        unpack(find(arrays, "adam_d.m." + pd[i].name), opt_d.first_moments()[i]);
        unpack(find(arrays, "adam_d.v." + pd[i].name), opt_d.second_moments()[i]);
    }
    opt_g.set_step_count(std::stoll(m.at("adam_g.t")));
    opt_d.set_step_count(std::stoll(m.at("adam_d.t")));
    return meta;
}

CheckpointMeta load_generator(const std::string& path, nn::Generator<float>& gen) {
    std::vector<NamedArray> arrays;
    ArchiveMeta m;
    read_archive(path, arrays, m);
    for (auto& p : gen.params()) unpack(find(arrays, p.name), p.value->v);
    for (auto& b : gen.buffers()) unpack(find(arrays, b.name), b.value->v);
    CheckpointMeta meta;
    meta.epoch = std::stoi(m.at("epoch"));
    meta.step = std::stoll(m.at("step"));
    meta.config_hash = m.at("config_hash");
    meta.config_toml = m.at("config_toml");
    meta.rng_state = m.at("rng_state");
    meta.features_sha256 = m.at("features_sha256");
    return meta;
}

}  // namespace uphdr::train
