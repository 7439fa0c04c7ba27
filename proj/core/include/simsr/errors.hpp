#pragma once

#include <stdexcept>
#include <string>

namespace simsr {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid inputs: bad probabilities, malformed configs, broken invariants.
struct ValidationError : Error {
    using Error::Error;
};

/// Shape disagreement between coupled arguments.
struct DimensionError : ValidationError {
    using ValidationError::ValidationError;
};

/// An iterative solver ran out of its iteration budget.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, double residual, int iterations)
        : Error(what), residual(residual), iterations(iterations) {}
    double residual;
    int iterations;
};

/// Filesystem / serialization failure.
struct IoError : Error {
    using Error::Error;
};

}  // namespace simsr
