#pragma once

#include <stdexcept>
#include <string>

namespace wlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A metric family produced a non-positive scale factor.
class DegenerateMetricError : public Error {
public:
    using Error::Error;
};

/// m < n for an m-dimensional curvature quantity.
class InvalidDimensionError : public Error {
public:
    using Error::Error;
};

/// m = n was requested with a non-constant potential.
class ConventionError : public Error {
public:
    using Error::Error;
};

class NotImplementedError : public Error {
public:
    using Error::Error;
};

/// The heat flow produced a non-positive value even after implicit Euler sub-stepping.
class PositivityError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Configuration problem; carries the dotted key path that caused it.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& message)
        : Error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

} // namespace wlab
