#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace patdelay {

enum class ErrorCode {
  // model errors (exit code 1)
  ZeroVector,
  DegenerateFrame,
  InvalidAngle,
  InvalidGeometry,
  StareFovViolation,
  NonConvergent,
  Timeout,
  // configuration / scenario errors (exit code 2)
  CoincidentNodes,
  EmptyScenario,
  OverlappingContacts,
  ParseError,
  ValidationError,
  UnknownNode,
  MalformedRow,
  IoError,
  // analysis errors (exit code 3)
  EmptySamples,
  DegenerateSamples,
  SchemaError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::InvalidAngle: return "InvalidAngle";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::StareFovViolation: return "StareFovViolation";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::CoincidentNodes: return "CoincidentNodes";
    case ErrorCode::EmptyScenario: return "EmptyScenario";
    case ErrorCode::OverlappingContacts: return "OverlappingContacts";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::DegenerateSamples: return "DegenerateSamples";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

/// Process exit code for an error: 1 model, 2 config/scenario, 3 analysis.
constexpr int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector:
    case ErrorCode::DegenerateFrame:
    case ErrorCode::InvalidAngle:
    case ErrorCode::InvalidGeometry:
    case ErrorCode::StareFovViolation:
    case ErrorCode::NonConvergent:
    case ErrorCode::Timeout:
      return 1;
    case ErrorCode::EmptySamples:
    case ErrorCode::DegenerateSamples:
    case ErrorCode::SchemaError:
      return 3;
    default:
      return 2;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace patdelay
