#pragma once

#include <stdexcept>
#include <string>

namespace dpcpower {

// Root of every error the library throws. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mismatched or zero dimensions (M = 0, K = 0, length mismatch).
class DimensionError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain (zero-norm channel, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Projection basis spans (or exceeds) the whole space.
class FullSpaceError : public Error {
public:
    using Error::Error;
};

// Basis vectors numerically linearly dependent.
class RankDeficiencyError : public Error {
public:
    using Error::Error;
};

// Lemma-1 power undefined because sin^2 of an interference angle is zero.
class InfeasibleGeometryError : public Error {
public:
    using Error::Error;
};

// Invalid configuration or parameter combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

// An expectation E[1/X] that does not converge.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// Exhaustive enumeration larger than the allowed budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

// Internal numerical cross-check failed (quadrature vs closed form).
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace dpcpower
