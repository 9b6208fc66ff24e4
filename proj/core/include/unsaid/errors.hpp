#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace unsaid {

enum class ErrorCode {
  CyclicGraph,
  MissingTable,
  MalformedTable,
  UnknownVariable,
  ImpossibleEvidence,
  InvalidEvidence,
  InvalidParams,
  DuplicateReportNode,
  UnknownSymptom,
  DuplicateParameterNode,
  DimensionMismatch,
  MissingSeverityClass,
  ParseError,
  ValidationError,
  IoError,
  InvalidConfig,
  UnsupportedMode,
  WrongPhase,
  AlreadyObserved,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `subject()` names the offending
/// variable, field or file when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace unsaid
