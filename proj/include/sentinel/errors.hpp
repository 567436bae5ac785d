#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sentinel {

enum class ErrorCode {
  // Input errors.
  NonSquare,
  NonFinite,
  NegativeEntry,
  RowSumOutOfTolerance,
  DuplicateEntry,
  IndexOutOfBounds,
  LengthMismatch,
  SizeMismatch,
  InvalidDistribution,
  InvalidExponent,
  UnsupportedMass,
  ZeroMassState,
  NotStationary,
  OutOfRange,
  BudgetInfeasible,
  StateSpaceTooLarge,
  ParseError,
  // Numerical failures.
  NoConvergence,
  SingularSystem,
  NonUniqueStationary,
  IterativeNoConvergence,
  SolveFailure,
  IdentityViolation,
};

std::string_view error_name(ErrorCode code);

/// True for codes that indicate a numerical failure rather than bad input.
bool is_numerical(ErrorCode code);

/// Every failure in the library is reported as an Error. The optional
/// fields carry the indices and value named by the code, e.g.
/// RowSumOutOfTolerance carries (row, -, actual_sum).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> first = std::nullopt,
        std::optional<std::size_t> second = std::nullopt,
        std::optional<double> value = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> first() const noexcept { return first_; }
  std::optional<std::size_t> second() const noexcept { return second_; }
  std::optional<double> value() const noexcept { return value_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> first_;
  std::optional<std::size_t> second_;
  std::optional<double> value_;
};

}  // namespace sentinel
