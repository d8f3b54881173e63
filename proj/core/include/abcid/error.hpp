#pragma once

#include <stdexcept>
#include <string>

namespace abcid {

/// Input outside the mathematical domain of an operation (non-stationary
/// coefficient, infeasible parameter, lag >= length, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical breakdown during a computation (ODE blow-up, failed factorization).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Singular regression design, e.g. the AR(2) normal equations of a constant series.
class DegenerateDesignError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Operand shapes that do not fit together.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace abcid
