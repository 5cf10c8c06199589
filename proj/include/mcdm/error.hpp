#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcdm {

enum class ErrorCode {
  // survey validation
  LengthMismatch,
  OutOfScale,
  SelfComparisonNotUnit,
  BestWorstMismatch,
  BestEqualsWorst,
  InvalidSurvey,
  TooFewCriteria,
  InvalidCriteria,
  // solver
  Infeasible,
  NumericalFailure,
  MismatchedInputs,
  EmptyInput,
  // topsis
  DegenerateColumn,
  WrongStage,
  EmptyMatrix,
  DimensionMismatch,
  InvalidWeights,
  DegenerateAlternative,
  InvalidMatrix,
  // tco
  InvalidSpec,
  NoMatchingVehicles,
  // io / pipeline
  ParseError,
  SchemaError,
  CrossReferenceError,
  FileNotFound,
  UnknownRun,
  InputChanged,
  WeightedEntryStage,
  DeltaOutOfRange,
  UnknownCriterion,
  // service
  UnknownSession,
  ValidationFailed,
  Internal,
};

std::string_view to_string(ErrorCode code);

/// True for errors caused by bad input (exit code 1 / HTTP 4xx) as opposed
/// to internal failures (exit code 2 / HTTP 5xx).
bool is_client_error(ErrorCode code);

/// Single error type thrown by the library. `details` carries one entry per
/// individual violation when several are reported at once.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::vector<std::string> details = {});

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::vector<std::string> details_;
};

}  // namespace mcdm
