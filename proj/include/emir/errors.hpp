#pragma once

#include <stdexcept>
#include <string>

namespace emir {

// Machine-readable failure codes. The CLI prints the code name and maps any
// Error to exit status 1.
enum class ErrorCode {
    ParseError,
    SchemaVersionMismatch,
    InfeasibleUtilization,
    FloatingNetwork,
    SingularSystem,
    NoConvergence,
    MissingBumpMatrix,
    EmptyDataset,
    SingleClassDataset,
    DimensionMismatch,
    VersionMismatch,
    AlignmentError,
    IoError,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::ParseError: return "PARSE_ERROR";
        case ErrorCode::SchemaVersionMismatch: return "SCHEMA_VERSION_MISMATCH";
        case ErrorCode::InfeasibleUtilization: return "INFEASIBLE_UTILIZATION";
        case ErrorCode::FloatingNetwork: return "FLOATING_NETWORK";
        case ErrorCode::SingularSystem: return "SINGULAR_SYSTEM";
        case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
        case ErrorCode::MissingBumpMatrix: return "MISSING_BUMP_MATRIX";
        case ErrorCode::EmptyDataset: return "EMPTY_DATASET";
        case ErrorCode::SingleClassDataset: return "SINGLE_CLASS_DATASET";
        case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
        case ErrorCode::VersionMismatch: return "VERSION_MISMATCH";
        case ErrorCode::AlignmentError: return "ALIGNMENT_ERROR";
        case ErrorCode::IoError: return "IO_ERROR";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace emir
