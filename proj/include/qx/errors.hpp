#pragma once

#include <stdexcept>
#include <string>

namespace qx {

// Base class for all library errors; CLI maps subclasses to exit codes.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : Error {
  using Error::Error;
};

// Requested product dimension exceeds the configured cap.
struct DimensionCapError : Error {
  using Error::Error;
};

struct RegisterNameError : Error {
  using Error::Error;
};

struct EnsembleError : Error {
  using Error::Error;
};

struct ParameterError : Error {
  using Error::Error;
};

struct ProjectorError : Error {
  using Error::Error;
};

struct NonUnitaryError : Error {
  using Error::Error;
};

// Iterative eigensolver failed to converge; carries the best residual seen.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double residual)
      : Error(what), best_residual(residual) {}
  double best_residual;
};

}  // namespace qx
