#pragma once

#include <stdexcept>
#include <string>

namespace splab {

/// Process exit codes used by the command-line driver.
enum class ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kValidation = 2,
  kConvergence = 3,
  kCapacity = 4,
};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode exit_code() const noexcept { return ExitCode::kFailure; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kValidation; }
};

/// Malformed input file; the message carries the offending line number.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, int line)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A configuration does not belong to the enumerated state space.
class MembershipError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Chain kind and state-space kind do not go together.
class PairingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// CSP constraint with zero or all local assignments satisfying.
class DegenerateConstraintError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A documented invariant of a computed quantity does not hold.
class InvariantBreach : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class CapacityError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kCapacity; }
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual0, double residual1)
      : Error(what), residual0_(residual0), residual1_(residual1) {}
  ExitCode exit_code() const noexcept override { return ExitCode::kConvergence; }
  double residual0() const noexcept { return residual0_; }
  double residual1() const noexcept { return residual1_; }

 private:
  double residual0_;
  double residual1_;
};

/// Random-regular pairing model exhausted its retry budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Detailed balance violated beyond tolerance (a kernel bug).
class ReversibilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace splab
