#pragma once

#include <stdexcept>
#include <string>

namespace loglab {

// Stable machine-readable failure codes. The CLI prints them verbatim as
// "ERROR <code>: <message>" on stderr, so the names here are part of the
// external interface and must not change casually.
enum class ErrorCode {
    LogDomain,         // a log argument (x + shift) was <= 0
    CZero,             // expansion point c = 0 requested
    InvalidConstants,  // a type invariant on stored constants was violated
    ParamDomain,       // a call parameter is outside its documented domain
    Singularity,       // quadrature integrand denominator within 1e-12 of zero
    NonConvergence,    // adaptive refinement exhausted its depth budget
    DegenerateDesign,  // least-squares system rank-deficient in its live columns
    DegenerateAnsatz,  // a2 = 0 where curvature of the value function is required
    Concavity,         // maximization refused because the value function is convex
    GridMismatch,      // point or grid outside a stored solution's extents
    Instability,       // non-finite values produced by a time march
    ConfigParse,       // malformed config text
    DuplicateKey,      // key assigned twice in one config source
    TypeMismatch,      // config value does not parse as its declared type
    UnknownKey,        // config key not recognized by the chosen experiment
    Io,                // filesystem failure while writing results
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::LogDomain: return "log-domain";
        case ErrorCode::CZero: return "c-zero";
        case ErrorCode::InvalidConstants: return "invalid-constants";
        case ErrorCode::ParamDomain: return "param-domain";
        case ErrorCode::Singularity: return "singularity";
        case ErrorCode::NonConvergence: return "non-convergence";
        case ErrorCode::DegenerateDesign: return "degenerate-design";
        case ErrorCode::DegenerateAnsatz: return "degenerate-ansatz";
        case ErrorCode::Concavity: return "concavity";
        case ErrorCode::GridMismatch: return "grid-mismatch";
        case ErrorCode::Instability: return "instability";
        case ErrorCode::ConfigParse: return "config-parse";
        case ErrorCode::DuplicateKey: return "duplicate-key";
        case ErrorCode::TypeMismatch: return "type-mismatch";
        case ErrorCode::UnknownKey: return "unknown-key";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace loglab
