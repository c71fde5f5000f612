#pragma once

#include <stdexcept>
#include <string>

namespace rvroot {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was not met by the caller.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A root whose phase maps outside the arcsin domain (spatial aliasing).
class GratingLobeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// An iterative kernel failed, or a numerical self-check detected drift.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, int iterations = -1)
        : Error(what), iterations_(iterations) {}
    int iterations() const noexcept { return iterations_; }

private:
    int iterations_;
};

/// W_s has a zero (or non-finite) entry so its inverse does not exist.
class RankDeficiency : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Two independent computations of the same quantity disagree.
class InconsistencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The estimator could not produce the requested number of DOAs.
class EstimationFailure : public Error {
public:
    using Error::Error;
};

/// An even-element array produced no real-axis root pair.
class TheoremViolation : public Error {
public:
    using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration; the message names the line or flag at fault.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace rvroot
