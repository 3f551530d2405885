#pragma once

#include <stdexcept>
#include <string>

namespace ggof {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite or out-of-range numeric input.
class DomainError : public Error {
public:
    using Error::Error;
};

// Mismatched vector/matrix sizes.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Truncation region selects no indices.
class EmptyRegionError : public Error {
public:
    using Error::Error;
};

// Cholesky pivot failure; `pivot` is the zero-based column that broke down.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, int pivot)
        : Error(what), pivot(pivot) {}
    int pivot;
};

// Correlation matrix fails the PSD check; carries the offending eigenvalue.
class NotPositiveDefiniteError : public Error {
public:
    NotPositiveDefiniteError(const std::string& what, double min_eigenvalue)
        : Error(what), min_eigenvalue(min_eigenvalue) {}
    double min_eigenvalue;
};

// Iterative fit failed to converge (e.g. separation in a logistic null fit).
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Requested engine cannot handle the correlation model (e.g. equal-correlation
// with rho < 0; callers should fall back to the LOESS or MC engines).
class UnsupportedModelError : public Error {
public:
    using Error::Error;
};

}  // namespace ggof
