#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace kuramoto3 {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state component became NaN or Inf during integration.
class NonFiniteError : public Error {
public:
    explicit NonFiniteError(double t)
        : Error("non-finite state at t=" + std::to_string(t)), time_(t) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class WindowTooShortError : public Error {
public:
    using Error::Error;
};

class NoPeaksError : public Error {
public:
    using Error::Error;
};

class MismatchedGridsError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Out-of-range value or unknown key. `field()` is the dotted path, e.g. "model.m".
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace kuramoto3
