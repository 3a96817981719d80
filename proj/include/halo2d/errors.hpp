#pragma once

#include <stdexcept>
#include <string>

namespace halo2d {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to converge or lost accuracy.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A discretization cannot resolve the problem it was asked to solve.
class GridError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Invalid user configuration (config files, CLI flags, option blocks).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace halo2d
