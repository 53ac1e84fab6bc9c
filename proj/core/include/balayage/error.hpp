#pragma once

#include <stdexcept>
#include <string>

namespace balayage {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Inputs violate a documented precondition (bad spec, bad config, size mismatch).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// The quadratic program did not reach its KKT tolerance.
class SolverError : public Error {
public:
  using Error::Error;
};

}  // namespace balayage
