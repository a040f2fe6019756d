#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace exclab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One rejected field, e.g. {"ideology1.beta", "must be > 0 (got -1)"}.
struct FieldIssue {
  std::string field;
  std::string message;
};

/// Parameter or input validation failure. Carries every offending field,
/// not only the first one encountered.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<FieldIssue> issues);
  explicit ValidationError(const std::string& field, const std::string& message)
      : ValidationError(std::vector<FieldIssue>{{field, message}}) {}

  const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<FieldIssue> issues_;
};

/// Failures of the numerical machinery (solves, eigenvalues, root finding,
/// integration).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateWeightsError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Argument outside the mathematical domain of a function (g(x) with x <= 0).
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

enum class IntegrationFailure { StepLimitExceeded, StepUnderflow, NegativeState, NonFinite };

const char* to_string(IntegrationFailure f) noexcept;

class IntegrationError : public NumericalError {
 public:
  IntegrationError(IntegrationFailure kind, const std::string& what)
      : NumericalError(what), kind_(kind) {}
  IntegrationFailure kind() const noexcept { return kind_; }

 private:
  IntegrationFailure kind_;
};

}  // namespace exclab
