#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmc {

enum class ErrorKind {
  ContractViolation,
  DomainError,
  EmptyQuadric,
  DegenerateQuadric,
  InvalidBracket,
  DoubleRoot,
  BadRoot,
  NotCoercive,
  OutOfRange,
  OutOfValidity,
  Unattainable,
  SingularDenominator,
  ConstraintViolation,
  BasePointOffQuadric,
  DomainExceeded,
  FamilyMismatch,
  NonTangent,
  BoundaryU,
  NoSignChange,
  IntegrationFailure,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the CLI
/// exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a bracket collapses onto a double root; the solution is the
/// constant g = t0.
class DoubleRootError : public Error {
 public:
  DoubleRootError(double t0, const std::string& what)
      : Error(ErrorKind::DoubleRoot, what), t0_(t0) {}

  double t0() const noexcept { return t0_; }

 private:
  double t0_;
};

}  // namespace cmc
