#pragma once

#include <stdexcept>
#include <string>

namespace ptwalk {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Eigenvector matrix condition number exceeds the diagonalizability threshold.
// Signals proximity to an exceptional point; callers must handle.
struct NonDiagonalizableError : Error {
    double condition;
    explicit NonDiagonalizableError(const std::string& what, double cond = 0.0)
        : Error(what), condition(cond) {}
};

// Matrix is numerically singular (smallest singular value below threshold).
struct SingularError : Error {
    using Error::Error;
};

// Input expected to be positive semi-definite has a significantly negative eigenvalue.
struct NotPsdError : Error {
    using Error::Error;
};

// Walk-operator eigenvalues coalesce at the sampled momentum (a = 1).
struct ExceptionalPointError : Error {
    double k;
    double gamma;
    ExceptionalPointError(const std::string& what, double k_, double gamma_)
        : Error(what), k(k_), gamma(gamma_) {}
};

// Metric inversion failed.
struct SingularMetricError : Error {
    using Error::Error;
};

// Two states built under different formalisms were combined.
struct FormalismMismatchError : Error {
    using Error::Error;
};

// Coin parameters admit no PT phase transition at finite gamma.
struct NoTransitionError : Error {
    using Error::Error;
};

// Invalid experiment configuration (bad schema, ranges or states).
struct ConfigError : Error {
    using Error::Error;
};

// A computation violated one of its postconditions.
struct ComputeError : Error {
    using Error::Error;
};

} // namespace ptwalk
