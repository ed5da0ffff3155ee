#pragma once

#include <stdexcept>
#include <string>

namespace spsaa {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation (non-finite entries,
/// infeasible points).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation called on an object that lacks the structure it requires.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double certificate)
      : Error(what), certificate_(certificate) {}

  double certificate() const noexcept { return certificate_; }

 private:
  double certificate_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace spsaa
