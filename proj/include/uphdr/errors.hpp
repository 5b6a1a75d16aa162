#pragma once

#include <stdexcept>

namespace uphdr {

/// Input data violates a precondition (bad pixel values, bad exposure time, ...).
struct InvalidInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tensor or image dimensions do not satisfy an operation's contract.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A manifest or other structured input file is malformed.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Configuration is inconsistent or required resources are missing.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Filesystem or codec failure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A checkpoint failed integrity verification.
struct ChecksumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite or runaway loss.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace uphdr
