#pragma once

#include <stdexcept>
#include <string>

namespace artnav {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value. The message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (bad record, non-monotone time).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A geometric quantity is undefined (coincident antennas, zero baseline).
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// Some antenna is not positioned by any absolute constraint.
class UnobservableProblem : public Error {
 public:
  using Error::Error;
};

/// Normal equations are rank deficient.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Requested operation is invalid for the factor state (e.g. status=none).
class FactorRejected : public Error {
 public:
  using Error::Error;
};

/// Metrics cannot be computed (too few samples, failed alignment).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace artnav
