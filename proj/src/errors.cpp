#include "ctrec/errors.hpp"

namespace ctrec {

const char *to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidEntry: return "InvalidEntry";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::RaggedEdge: return "RaggedEdge";
    case ErrorKind::NotAFactor: return "NotAFactor";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::OrderingMismatch: return "OrderingMismatch";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::BenchmarkZero: return "BenchmarkZero";
    case ErrorKind::EmptySelection: return "EmptySelection";
    case ErrorKind::FormatError: return "FormatError";
    }
    return "Error";
}

} // namespace ctrec
