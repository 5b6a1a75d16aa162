#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace uphdr {

/// One serialized tensor in a parameter archive.
struct NamedArray {
    std::string name;
    std::string dtype;  // "f4" | "f8" | "i8"
    std::vector<int64_t> shape;
    std::vector<char> bytes;
};

/// Free-form key/value metadata stored alongside the arrays
/// (epoch counters, config hash, rng state, ...).
using ArchiveMeta = std::map<std::string, std::string>;

/// Writes arrays + metadata with a trailing SHA-256; the write is atomic
/// (temp file then rename).
void write_archive(const std::string& path, const std::vector<NamedArray>& arrays,
                   const ArchiveMeta& meta);

/// Reads an archive, verifying the trailing digest (ChecksumError on tamper).
void read_archive(const std::string& path, std::vector<NamedArray>& arrays, ArchiveMeta& meta);

std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& s);

}  // namespace uphdr
