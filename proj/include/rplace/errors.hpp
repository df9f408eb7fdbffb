#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace rplace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite data or out-of-range scalar arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A generator whose spectral abscissa is not strictly negative.
class UnstableGenerator : public Error {
 public:
  explicit UnstableGenerator(const std::string& what, double abscissa)
      : Error(what), abscissa_(abscissa) {}
  double abscissa() const { return abscissa_; }

 private:
  double abscissa_;
};

/// lambda_i(A1) + lambda_j(A2) numerically zero for some pair.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

class HorizonTooShort : public Error {
 public:
  HorizonTooShort(const std::string& what, double tail_bound)
      : Error(what), tail_bound_(tail_bound) {}
  double tail_bound() const { return tail_bound_; }

 private:
  double tail_bound_;
};

class NewtonStall : public Error {
 public:
  using Error::Error;
};

class ClosedLoopUnstable : public Error {
 public:
  ClosedLoopUnstable(const std::string& what, int iteration)
      : Error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// dG_p^* dG_p is singular (or dG_p vanishes) where the caller needs it
/// invertible.
class DegenerateFamily : public Error {
 public:
  using Error::Error;
};

/// Iteration budget exhausted. Carries the iterate with the smallest
/// stationarity residual seen.
class MaxIterExceeded : public Error {
 public:
  MaxIterExceeded(const std::string& what, Eigen::VectorXd best)
      : Error(what), best_(std::move(best)) {}
  const Eigen::VectorXd& best_iterate() const { return best_; }

 private:
  Eigen::VectorXd best_;
};

/// Configuration problem, tagged with the dotted path of the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace rplace
