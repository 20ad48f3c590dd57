#pragma once

#include <stdexcept>
#include <string>

namespace tllab {

// Raised when a dense realization would exceed the oracle's strand budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a numerical kernel or eigenvalue snap cannot be decided cleanly.
class RankAmbiguity : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArityMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace tllab
