#pragma once

#include <stdexcept>
#include <string>

namespace stieltjes {

// Input-side failures: malformed representations, bad intervals, schema
// violations in files.  The CLI maps these to exit code 2.
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

struct SchemaError : std::invalid_argument {
    explicit SchemaError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failures discovered while computing.  The CLI maps these to
// exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateDenominator : NumericalError {
    explicit DegenerateDenominator(const std::string& what) : NumericalError(what) {}
};

struct NonConvergence : NumericalError {
    NonConvergence(const std::string& what, double best) : NumericalError(what), best_residual(best) {}
    double best_residual;
};

struct GuardViolation : NumericalError {
    explicit GuardViolation(const std::string& what) : NumericalError(what) {}
};

struct NonFiniteState : NumericalError {
    explicit NonFiniteState(const std::string& what) : NumericalError(what) {}
};

}  // namespace stieltjes
