#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace chorin {

/// Broad failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  Configuration,  // bad user input, violated preconditions
  Numerical,      // solver divergence, aborted studies
  Invariant,      // a checked invariant did not hold
};

/// Base class for every error thrown by the library. `code()` is a short
/// machine-readable tag such as "E_MAX_ITER".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& what)
      : std::runtime_error(what), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::Configuration, "E_INVALID_ARGUMENT", what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what)
      : Error(ErrorKind::Configuration, "E_DIMENSION", what) {}
};

class NonDivisibleFactor : public Error {
 public:
  explicit NonDivisibleFactor(const std::string& what)
      : Error(ErrorKind::Configuration, "E_NON_DIVISIBLE", what) {}
};

class CheckpointMismatch : public Error {
 public:
  explicit CheckpointMismatch(const std::string& what)
      : Error(ErrorKind::Configuration, "E_CHECKPOINT", what) {}
};

class MaxIterationsExceeded : public Error {
 public:
  MaxIterationsExceeded(std::size_t iterations, double residual)
      : Error(ErrorKind::Numerical, "E_MAX_ITER",
              "iterative solve did not converge after " +
                  std::to_string(iterations) +
                  " iterations (relative residual " +
                  std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

class IncompatibleRhs : public Error {
 public:
  explicit IncompatibleRhs(double constant_component)
      : Error(ErrorKind::Numerical, "E_INCOMPATIBLE_RHS",
              "right-hand side has a constant component of relative size " +
                  std::to_string(constant_component) +
                  " but the operator is singular on constants"),
        constant_component_(constant_component) {}

  double constant_component() const noexcept { return constant_component_; }

 private:
  double constant_component_;
};

/// A time step failed; carries the step index that was being computed.
class StepFailure : public Error {
 public:
  StepFailure(std::size_t step, const std::string& cause)
      : Error(ErrorKind::Numerical, "E_STEP_FAILED",
              "time step " + std::to_string(step) + " failed: " + cause),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class StudyAborted : public Error {
 public:
  StudyAborted(std::size_t failed, std::size_t total)
      : Error(ErrorKind::Numerical, "E_STUDY_ABORTED",
              std::to_string(failed) + " of " + std::to_string(total) +
                  " realizations failed (limit 5%)") {}
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what)
      : Error(ErrorKind::Invariant, "E_INVARIANT", what) {}
};

}  // namespace chorin
