#pragma once

#include <stdexcept>
#include <string>

namespace jumpsupport {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition (bad dimension, bad range, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Malformed or incomplete configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: divergence, quadrature, blow-up, infeasibility.
class NumericalError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InfeasibleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotAnalyzableError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BlowUpError : public NumericalError {
public:
    BlowUpError(double time, const std::string& what)
        : NumericalError(what + " (t=" + std::to_string(time) + ")"), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace jumpsupport
