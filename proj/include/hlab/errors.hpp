#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hlab {

/// Machine-readable failure categories. The CLI prints these verbatim inside
/// `error[<code>]:` diagnostics and maps them onto exit codes.
enum class ErrorCode {
  DimensionMismatch,
  NotHermitian,
  NotNormalized,
  NotUnitary,
  NotProjector,
  NotOrthogonal,
  Incomplete,
  ZeroElement,
  DuplicateLabel,
  Incompatible,
  TooLarge,
  InvalidSlot,
  BadLabel,
  Inconsistent,
  ZeroProbabilityCondition,
  SingleFrameworkViolation,
  StructureMismatch,
  InapplicableFramework,
  UnknownScenario,
  ParseError,
  UndefinedName,
  DuplicateName,
  InvalidArgument,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotProjector: return "NotProjector";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::Incomplete: return "Incomplete";
    case ErrorCode::ZeroElement: return "ZeroElement";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::Incompatible: return "Incompatible";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidSlot: return "InvalidSlot";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::ZeroProbabilityCondition: return "ZeroProbabilityCondition";
    case ErrorCode::SingleFrameworkViolation: return "SingleFrameworkViolation";
    case ErrorCode::StructureMismatch: return "StructureMismatch";
    case ErrorCode::InapplicableFramework: return "InapplicableFramework";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UndefinedName: return "UndefinedName";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hlab
