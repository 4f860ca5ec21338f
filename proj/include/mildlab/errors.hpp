#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mildlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonFiniteInput : public Error {
public:
    using Error::Error;
};

/// Bracket expansion of a scalar solve exceeded its bound. Only a malformed
/// (non-monotone) graph can trigger this.
class BracketFailure : public Error {
public:
    using Error::Error;
};

class InvalidExponent : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class NegativeTime : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class InvalidTimeGrid : public Error {
public:
    using Error::Error;
};

class InvalidGraph : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed config text. `position` is a byte offset into the input.
class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& message)
        : Error("parse error at byte " + std::to_string(position) + ": " + message),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Every violated constraint of a config, not just the first one.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid config:";
        for (const auto& s : v) out += "\n  - " + s;
        return out;
    }
    std::vector<std::string> violations_;
};

}  // namespace mildlab
