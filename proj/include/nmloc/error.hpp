#pragma once

#include <stdexcept>
#include <string>

namespace nmloc {

enum class ErrorKind {
    InvalidArgument,
    BoxMismatch,
    DegenerateSequence,
    DistalViolation,
    TameRange,
    UnreducedDiagonal,
    FixedPointStalled,
    NeumannSmallness,
    BoundViolation,
    SymmetryDefect,
    SpectrumSymmetry,
    PoleProximity,
    RationalFrequency,
    Config,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Raised for malformed configuration; the CLI maps it to exit code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

}  // namespace nmloc
