#pragma once

#include <stdexcept>
#include <string>

namespace mpps {

// Error categories map 1:1 onto CLI exit codes (see tools/mpps_main.cpp):
//   ConfigError       -> 2   bad input: schema violations, invalid parameters
//   ConditionError    -> 3   a mathematical gating condition failed
//   SolverError       -> 4   the numerics gave up (step failure, singularity)
//   VerificationError -> 5   a coverage / verification check failed
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};
struct ConditionError : Error {
    using Error::Error;
};
struct SolverError : Error {
    using Error::Error;
};
struct VerificationError : Error {
    using Error::Error;
};

// --- config ---
struct ConfigurationError final : ConfigError {
    using ConfigError::ConfigError;
};

// --- condition ---
struct ConditionFailed final : ConditionError {
    using ConditionError::ConditionError;
};
struct NoContraction final : ConditionError {
    using ConditionError::ConditionError;
};

// --- solver ---
struct StepFailure final : SolverError {
    using SolverError::SolverError;
};
struct SingularPeriodMap final : SolverError {
    using SolverError::SolverError;
};
struct DomainExit final : SolverError {
    using SolverError::SolverError;
};

// --- verification / coverage ---
struct NotFound final : VerificationError {
    double delta;
    explicit NotFound(double d)
        : VerificationError("no return certified at precision delta=" + std::to_string(d) +
                            "; lengthen the orbit"),
          delta(d) {}
};
struct OutOfRange final : VerificationError {
    double t;
    explicit OutOfRange(double t_, const std::string& what_range)
        : VerificationError("evaluation at t=" + std::to_string(t_) + " outside covered range " +
                            what_range),
          t(t_) {}
};
struct CoverageError final : VerificationError {
    using VerificationError::VerificationError;
};
struct InsufficientRange final : VerificationError {
    using VerificationError::VerificationError;
};

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const ConditionError*>(&e)) return 3;
    if (dynamic_cast<const SolverError*>(&e)) return 4;
    if (dynamic_cast<const VerificationError*>(&e)) return 5;
    return 1;
}

} // namespace mpps
