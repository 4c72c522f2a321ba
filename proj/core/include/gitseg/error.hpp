#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gitseg {

// Root of every error thrown by the library. The CLI maps IoError to exit
// code 1 and every other Error to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidShape : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class EmptyVolume : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Hausdorff distance is undefined when one side has no foreground.
class EmptyForeground : public Error {
public:
    using Error::Error;
};

class UnknownClass : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class DuplicateSlice : public Error {
public:
    using Error::Error;
};

class PredictorError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

enum class RleErrorKind {
    OddTokenCount,
    NonInteger,
    NonPositive,
    RunOutOfBounds,
    OverlappingRuns,
};

const char* to_string(RleErrorKind kind) noexcept;

class MalformedRle : public Error {
public:
    MalformedRle(RleErrorKind kind, std::size_t token_index, const std::string& detail);

    RleErrorKind kind() const noexcept { return kind_; }
    // 0-based index of the offending token in the whitespace-split input.
    std::size_t token_index() const noexcept { return token_index_; }

private:
    RleErrorKind kind_;
    std::size_t token_index_;
};

}  // namespace gitseg
