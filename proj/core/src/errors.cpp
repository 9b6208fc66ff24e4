#include "unsaid/errors.hpp"

namespace unsaid {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::MissingTable: return "MissingTable";
    case ErrorCode::MalformedTable: return "MalformedTable";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::ImpossibleEvidence: return "ImpossibleEvidence";
    case ErrorCode::InvalidEvidence: return "InvalidEvidence";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DuplicateReportNode: return "DuplicateReportNode";
    case ErrorCode::UnknownSymptom: return "UnknownSymptom";
    case ErrorCode::DuplicateParameterNode: return "DuplicateParameterNode";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MissingSeverityClass: return "MissingSeverityClass";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnsupportedMode: return "UnsupportedMode";
    case ErrorCode::WrongPhase: return "WrongPhase";
    case ErrorCode::AlreadyObserved: return "AlreadyObserved";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string message, std::string subject)
    : std::runtime_error(std::move(message)), code_(code), subject_(std::move(subject)) {}

}  // namespace unsaid
