#include "sentinel/errors.hpp"

namespace sentinel {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::RowSumOutOfTolerance: return "RowSumOutOfTolerance";
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::IndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::UnsupportedMass: return "UnsupportedMass";
    case ErrorCode::ZeroMassState: return "ZeroMassState";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BudgetInfeasible: return "BudgetInfeasible";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonUniqueStationary: return "NonUniqueStationary";
    case ErrorCode::IterativeNoConvergence: return "IterativeNoConvergence";
    case ErrorCode::SolveFailure: return "SolveFailure";
    case ErrorCode::IdentityViolation: return "IdentityViolation";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::SingularSystem:
    case ErrorCode::NonUniqueStationary:
    case ErrorCode::IterativeNoConvergence:
    case ErrorCode::SolveFailure:
    case ErrorCode::IdentityViolation:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> first,
             std::optional<std::size_t> second, std::optional<double> value)
    : std::runtime_error(std::string(error_name(code)) + ": " + message),
      code_(code),
      first_(first),
      second_(second),
      value_(value) {}

}  // namespace sentinel
