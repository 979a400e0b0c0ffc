#pragma once

#include <stdexcept>
#include <string>

namespace peaqc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Fock cutoff is too small for the requested state or operator.
class TruncationTooSmall : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidGaussianParams : public Error {
 public:
  using Error::Error;
};

/// Two infinitely-squeezed wave packets landed on the same coordinate.
class CoordinateCollision : public Error {
 public:
  using Error::Error;
};

class NotPositive : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double primal, double dual)
      : Error(what), primal_residual(primal), dual_residual(dual) {}
  double primal_residual;
  double dual_residual;
};

/// Bad configuration; `field` is a JSON pointer, `line` is 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, std::string field = {}, int line = 0);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace peaqc
