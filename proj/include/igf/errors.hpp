#ifndef IGF_ERRORS_HPP
#define IGF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace igf {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a documented precondition or type invariant.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// An iterative numerical procedure failed to converge to its tolerance.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A time-stepping scheme lost positivity, definiteness or finiteness.
class StabilityError : public Error {
public:
    using Error::Error;
};

/// A model hypothesis (span membership) fails numerically; message reports the residual.
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// Arguments that must refer to the same object (e.g. tangent base points) do not.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Degenerate geometry: a metric that must be positive definite is singular.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A truncated computational domain is too small for the requested accuracy.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Experiment configuration failed validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure while reading configs or writing results.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace igf

#endif
