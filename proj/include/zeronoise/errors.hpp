#pragma once

#include <stdexcept>
#include <string>

namespace zeronoise {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input violates a documented precondition or invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A discretization is too coarse for the requested accuracy.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// An iterative method ran out of iterations or a direct solve was singular.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// The operation does not apply to this representation or input class.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Configuration could not be parsed; carries the offending line.
class ConfigError : public Error {
public:
    ConfigError(int line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace zeronoise
