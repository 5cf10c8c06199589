#include "mcdm/error.hpp"

namespace mcdm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::OutOfScale: return "OutOfScale";
    case ErrorCode::SelfComparisonNotUnit: return "SelfComparisonNotUnit";
    case ErrorCode::BestWorstMismatch: return "BestWorstMismatch";
    case ErrorCode::BestEqualsWorst: return "BestEqualsWorst";
    case ErrorCode::InvalidSurvey: return "InvalidSurvey";
    case ErrorCode::TooFewCriteria: return "TooFewCriteria";
    case ErrorCode::InvalidCriteria: return "InvalidCriteria";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::MismatchedInputs: return "MismatchedInputs";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::WrongStage: return "WrongStage";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::DegenerateAlternative: return "DegenerateAlternative";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NoMatchingVehicles: return "NoMatchingVehicles";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::CrossReferenceError: return "CrossReferenceError";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnknownRun: return "UnknownRun";
    case ErrorCode::InputChanged: return "InputChanged";
    case ErrorCode::WeightedEntryStage: return "WeightedEntryStage";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::UnknownCriterion: return "UnknownCriterion";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

bool is_client_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::Infeasible:
    case ErrorCode::NumericalFailure:
    case ErrorCode::Internal:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorCode code, std::string message, std::vector<std::string> details)
    : std::runtime_error(std::move(message)), code_(code), details_(std::move(details)) {}

}  // namespace mcdm
