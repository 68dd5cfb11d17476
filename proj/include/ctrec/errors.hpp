#pragma once

#include <stdexcept>
#include <string>

namespace ctrec {

enum class ErrorKind {
    DimensionMismatch,
    InvalidEntry,
    InvalidInput,
    RaggedEdge,
    NotAFactor,
    DegenerateSample,
    SingularCovariance,
    SingularSystem,
    OrderingMismatch,
    NonConvergence,
    BenchmarkZero,
    EmptySelection,
    FormatError,
};

const char *to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Numerical failures (covariance or solver) as opposed to bad input.
inline bool is_numerical(ErrorKind kind) {
    return kind == ErrorKind::SingularCovariance || kind == ErrorKind::SingularSystem ||
           kind == ErrorKind::DegenerateSample;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

} // namespace ctrec
