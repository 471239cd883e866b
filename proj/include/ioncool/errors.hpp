#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ioncool {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two ions at the same coordinate.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Iterative solve hit its cap. Carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Hessian is not positive definite: the chain is not confined.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// Mode selection or a perturbative sum hit a (near-)degenerate spectrum.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

/// Cooling rate is zero, so no finite cooling limit exists.
class NoCoolingError : public Error {
 public:
  using Error::Error;
};

/// Combinatorial enumeration refused; carries the configuration count.
class GuardExceeded : public Error {
 public:
  GuardExceeded(const std::string& what, std::size_t count)
      : Error(what), count_(count) {}
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

/// Configuration failed schema validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ioncool
