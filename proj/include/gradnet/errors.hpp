#pragma once

#include <stdexcept>
#include <string>

namespace gradnet {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a model or network contract (asymmetric Q, A_n = 0, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Fields or networks defined on different lattices.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Sampled data inconsistent with the boundary constraints.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Operation not available for the given model (nonlinear, Dirichlet, ...).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Malformed or contradictory run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Too few usable rows to fit a convergence order.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Negative squared frequency at wavenumber `k`.
class ImaginaryFrequencyError : public Error {
public:
    ImaginaryFrequencyError(double k, double omega_squared);
    double wavenumber() const noexcept { return k_; }
    double omega_squared() const noexcept { return omega_squared_; }

private:
    double k_;
    double omega_squared_;
};

/// A trajectory produced non-finite values; `last_finite_time` is the last checked time
/// at which the state was finite.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double last_finite_time)
        : Error(what), last_finite_time_(last_finite_time) {}
    double last_finite_time() const noexcept { return last_finite_time_; }

private:
    double last_finite_time_;
};

}  // namespace gradnet
