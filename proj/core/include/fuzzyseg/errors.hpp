#pragma once

#include <stdexcept>
#include <string>

namespace fuzzyseg {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Caller-supplied sizes, ranges or shapes are invalid.
class InvalidParameters : public Error {
public:
    using Error::Error;
};

/// A solver could not make progress (see concrete subclasses).
class SolverError : public Error {
public:
    using Error::Error;
};

/// A cluster lost all of its membership mass (zero center denominator).
class EmptyClusterError : public SolverError {
public:
    using SolverError::SolverError;
};

/// A possibilistic scale eta_i came out zero: the cluster has no spread.
class DegenerateEtaError : public SolverError {
public:
    using SolverError::SolverError;
};

/// The sample covariance matrix is not invertible.
class SingularCovariance : public Error {
public:
    using Error::Error;
};

/// A reference mask is unusable for evaluation (e.g. no object pixels).
class InvalidReference : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// The file is recognized but the format variant is not supported.
class UnsupportedFormatError : public IoError {
public:
    using IoError::IoError;
};

/// The file claims a supported format but its header does not parse.
class MalformedHeaderError : public IoError {
public:
    using IoError::IoError;
};

/// The header parsed but the pixel payload ended early.
class TruncatedPayloadError : public IoError {
public:
    using IoError::IoError;
};

}  // namespace fuzzyseg
