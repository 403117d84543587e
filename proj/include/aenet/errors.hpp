#pragma once

#include <stdexcept>
#include <string>

namespace aenet {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or incompatible options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shape or grid mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A function produced a non-finite value at a sample point.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Query point outside the domain an operation can handle.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Time integrator produced non-finite state.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Training loss became non-finite.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written, or had an unexpected layout.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace aenet
