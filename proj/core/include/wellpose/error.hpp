#pragma once

#include <stdexcept>
#include <string>

namespace wellpose {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (tau > tau0, xi = 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A parameter set or configuration failed its invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure did not reach its tolerance.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double achieved = 0.0)
        : Error(what), achieved_(achieved) {}

    /// Error estimate (or reached time, for ODE failures) at the point of failure.
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace wellpose
