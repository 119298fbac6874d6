#pragma once

#include <stdexcept>
#include <string>

namespace gkp {

// Error taxonomy shared by all modules. Codes map to CLI exit statuses:
// config/usage problems exit 2, numerical failures exit 1.
enum class ErrorCode {
    DimensionMismatch,
    NonZeroXMean,
    InvalidParams,
    DegenerateField,
    InconsistentGroundState,
    NoConvergence,
    CollapseToZero,
    BoundaryContamination,
    NoNehariRoot,
    FlowDiverges,
    NearSingular,
    InsufficientSampling,
    NanEncountered,
    NoPositiveRoot,
    NotAdmissible,
    ResamplingError,
    SolverFailure,
    IoError,
    ConfigError,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // true for errors caused by bad user input rather than numerics
    bool is_usage_error() const noexcept {
        return code_ == ErrorCode::InvalidParams || code_ == ErrorCode::ConfigError ||
               code_ == ErrorCode::IoError || code_ == ErrorCode::DimensionMismatch;
    }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace gkp
