#pragma once

#include <stdexcept>
#include <string>

namespace sketchiq {

// Error taxonomy shared by all modules. The CLI maps any Error to exit
// status 1 with the message on stderr; usage mistakes exit 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched dimensions between images that must agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Image too small for the requested operation.
class SizeError : public Error {
public:
    using Error::Error;
};

// Invalid parameter value.
class ParamError : public Error {
public:
    using Error::Error;
};

// Unreadable or unsupported file content.
class FormatError : public Error {
public:
    using Error::Error;
};

// Inconsistent corpus contents or labels.
class DataError : public Error {
public:
    using Error::Error;
};

// Unusable run configuration (empty gallery, empty training set, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Singular or otherwise non-finite numerics.
class NumericError : public Error {
public:
    using Error::Error;
};

// Filesystem failures, reported with path context.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sketchiq
