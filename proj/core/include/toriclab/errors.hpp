#pragma once

#include <stdexcept>
#include <string>

namespace toriclab {

// Error taxonomy shared across modules. Budget violations are distinct from
// bad inputs so that callers (and the CLI exit codes) can tell them apart.
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidGeometryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a computation finished but failed its own convergence or
// completeness checks; the message carries the diagnostic.
struct DiagnosticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace toriclab
