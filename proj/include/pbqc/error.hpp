#pragma once

#include <stdexcept>
#include <string>

namespace pbqc {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable class name surfaced by the command-line tool.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Matrix/state dimensions do not fit together.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error("dimension", what) {}
};

/// Bad argument or input that fails validation.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

/// Request exceeds what the simulator is willing to allocate or compute.
class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& what) : Error("resource", what) {}
};

/// A protocol or strategy precondition was violated at run time.
class ProtocolError : public Error {
public:
    explicit ProtocolError(const std::string& what) : Error("protocol", what) {}
};

/// A numerical routine failed to reach its stated accuracy.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error("numerical", what) {}
};

}  // namespace pbqc
