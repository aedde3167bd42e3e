#pragma once

#include <stdexcept>
#include <string>

namespace robin {

/// Invalid input or violated precondition (CLI maps this to exit code 2).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure in a linear solve (CLI maps this to exit code 1).
/// Carries the residual attained and, for time-marching solves, the step index.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual_attained, int step_index = -1)
        : std::runtime_error(what), residual(residual_attained), step(step_index) {}

    double residual;
    int step;  // -1 for stationary solves
};

/// Raised when the data cannot determine the coefficient, e.g. the forward
/// solution vanishes on the inner boundary.
class IdentifiabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace robin
