#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdgm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatches, out-of-range indices, negative lags.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A matrix that must be inverted is (numerically) singular.
class SingularOperatorError : public Error {
public:
    using Error::Error;
};

/// Nonpositive Jacobians, clockwise elements, mismatched shared edges.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Periodic faces that cannot be matched under translation.
class PairingError : public Error {
public:
    using Error::Error;
};

/// Inconsistent boundary-condition or sampler configuration.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// A per-element Cholesky or eigen factorization failed.
class FactorizationError : public Error {
public:
    using Error::Error;
};

/// The time integrator produced a non-finite or exploding state.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// A Monte-Carlo estimate was requested from zero samples.
class EmptyEstimateError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Text-format parse failure; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace sdgm
