#pragma once

#include <stdexcept>
#include <string>

namespace hycop {

/// Base class for all named failure modes thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A primitive or solver was asked to run with a boundary it does not support.
struct BoundaryUnsupported : Error {
    using Error::Error;
};

/// swap_boundary_variant called on a system without a boundary variant.
struct BoundarySwapUnsupported : Error {
    using Error::Error;
};

/// Negative or non-finite duration handed to a primitive or executor.
struct InvalidDuration : Error {
    using Error::Error;
};

/// Field shape (grid size / channel count) does not match what the operation expects.
struct StateShapeError : Error {
    using Error::Error;
};

/// CFL-limited substep count exceeded the hard cap (runaway stiffness guard).
struct StiffnessCap : Error {
    using Error::Error;
};

/// Program execution produced non-finite or unbounded state.
/// Carries the index of the offending program step.
struct ExecutionDiverged : Error {
    int step_index;
    ExecutionDiverged(const std::string& msg, int step) : Error(msg), step_index(step) {}
};

/// A reference solver blew up while generating ground truth.
struct ReferenceDiverged : Error {
    using Error::Error;
};

/// Policy forward pass produced non-finite outputs.
struct PolicyNumericalError : Error {
    using Error::Error;
};

/// Parameter vector length does not match the declared architecture.
struct ParamShapeError : Error {
    using Error::Error;
};

/// Malformed or out-of-range configuration value; message names the field.
struct ConfigError : Error {
    using Error::Error;
};

/// Dataset or checkpoint file is missing, truncated, or fails format checks.
struct FileFormatError : Error {
    using Error::Error;
};

/// Initial-condition family index unknown for the requested system.
struct UnknownIcFamily : Error {
    using Error::Error;
};

/// Too few post-transient snapshots for attractor statistics.
struct InsufficientTrajectory : Error {
    using Error::Error;
};

}  // namespace hycop
