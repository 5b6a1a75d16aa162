#include "uphdr/container.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "uphdr/errors.hpp"

namespace uphdr {

namespace {
constexpr char kMagic[8] = {'U', 'P', 'H', 'D', 'R', 'A', 'R', '1'};
}

std::string sha256_hex(const void* data, size_t len) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int dlen = 0;
    EVP_Digest(data, len, digest, &dlen, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(dlen * 2);
    for (unsigned int i = 0; i < dlen; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

void write_archive(const std::string& path, const std::vector<NamedArray>& arrays,
                   const ArchiveMeta& meta) {
    nlohmann::json header;
    header["meta"] = meta;
    auto& entries = header["entries"] = nlohmann::json::array();
    size_t offset = 0;
    for (const auto& a : arrays) {
        entries.push_back({{"name", a.name},
                           {"dtype", a.dtype},
                           {"shape", a.shape},
                           {"offset", offset},
                           {"bytes", a.bytes.size()}});
        offset += a.bytes.size();
    }
    const std::string hj = header.dump();

    std::string blob;
    blob.reserve(sizeof(kMagic) + 8 + hj.size() + offset);
    blob.append(kMagic, sizeof(kMagic));
    uint64_t hlen = hj.size();
    blob.append(reinterpret_cast<const char*>(&hlen), 8);
    blob.append(hj);
    for (const auto& a : arrays) blob.append(a.bytes.data(), a.bytes.size());
    const std::string digest = sha256_hex(blob);

    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open for writing: " + tmp);
        f.write(blob.data(), static_cast<std::streamsize>(blob.size()));
        f.write(digest.data(), static_cast<std::streamsize>(digest.size()));
        if (!f) throw IoError("short write: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void read_archive(const std::string& path, std::vector<NamedArray>& arrays, ArchiveMeta& meta) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string blob((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (blob.size() < sizeof(kMagic) + 8 + 64) throw ChecksumError("archive truncated: " + path);

    const std::string digest = blob.substr(blob.size() - 64);
    blob.resize(blob.size() - 64);
    if (sha256_hex(blob) != digest)
        throw ChecksumError("archive checksum mismatch (file corrupted or tampered): " + path);
    if (std::memcmp(blob.data(), kMagic, sizeof(kMagic)) != 0)
        throw IoError("not a parameter archive: " + path);

    uint64_t hlen = 0;
    std::memcpy(&hlen, blob.data() + sizeof(kMagic), 8);
    const size_t data_start = sizeof(kMagic) + 8 + hlen;
    if (data_start > blob.size()) throw ChecksumError("archive header truncated: " + path);
    nlohmann::json header = nlohmann::json::parse(blob.substr(sizeof(kMagic) + 8, hlen));

    meta = header.at("meta").get<ArchiveMeta>();
    arrays.clear();
    for (const auto& e : header.at("entries")) {
        NamedArray a;
        a.name = e.at("name").get<std::string>();
        a.dtype = e.at("dtype").get<std::string>();
        a.shape = e.at("shape").get<std::vector<int64_t>>();
        const size_t off = e.at("offset").get<size_t>(), n = e.at("bytes").get<size_t>();
        if (data_start + off + n > blob.size())
            throw ChecksumError("archive entry out of bounds: " + a.name);
        a.bytes.assign(blob.begin() + data_start + off, blob.begin() + data_start + off + n);
        arrays.push_back(std::move(a));
    }
}

}  // namespace uphdr
