#include "cmc/error.hpp"

namespace cmc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ContractViolation: return "ContractViolation";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::EmptyQuadric: return "EmptyQuadric";
    case ErrorKind::DegenerateQuadric: return "DegenerateQuadric";
    case ErrorKind::InvalidBracket: return "InvalidBracket";
    case ErrorKind::DoubleRoot: return "DoubleRoot";
    case ErrorKind::BadRoot: return "BadRoot";
    case ErrorKind::NotCoercive: return "NotCoercive";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::OutOfValidity: return "OutOfValidity";
    case ErrorKind::Unattainable: return "Unattainable";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::BasePointOffQuadric: return "BasePointOffQuadric";
    case ErrorKind::DomainExceeded: return "DomainExceeded";
    case ErrorKind::FamilyMismatch: return "FamilyMismatch";
    case ErrorKind::NonTangent: return "NonTangent";
    case ErrorKind::BoundaryU: return "BoundaryU";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::IntegrationFailure: return "IntegrationFailure";
  }
  return "Unknown";
}

}  // namespace cmc
