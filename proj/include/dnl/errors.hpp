// Exception hierarchy shared by every module.
//
// Three families map onto the CLI exit codes: bad input (2), numerical
// breakdown (3) and a failed inequality check (4).

#pragma once

#include <stdexcept>
#include <string>

namespace dnl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept = 0;
};

class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// gamma == 1 (exponential profile); the library only handles power-law profiles.
class LogarithmicCaseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Barenblatt mass is infinite (m <= m_c).
class DivergentMassError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The nu weight blows up at r = 0 for p < 2 without regularization.
class SingularWeightError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Initial data escapes the Barenblatt sandwich u_{D0} <= u0 <= u_{D1}.
class SandwichViolation : public ValidationError {
 public:
  SandwichViolation(const std::string& what, double radius)
      : ValidationError(what), radius_(radius) {}
  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class VerificationFailure : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace dnl
