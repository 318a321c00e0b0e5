// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rydberg {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range configuration input (CLI exit code 1).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// A caller violated a documented precondition (non-square matrix, bad dt, ...).
class PreconditionError : public Error {
  public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A numerical procedure could not produce a meaningful result.
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Null space of the Liouvillian is not one-dimensional.
class DegenerateSteadyStateError : public NumericalError {
  public:
    explicit DegenerateSteadyStateError(std::size_t dimension)
        : NumericalError("degenerate steady state: null-space dimension " + std::to_string(dimension)),
          dimension_(dimension) {}

    std::size_t dimension() const noexcept { return dimension_; }

  private:
    std::size_t dimension_;
};

}  // namespace rydberg
