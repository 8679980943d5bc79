#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lobvol {

enum class ErrorCode {
  InsufficientData,
  InvalidSeries,
  MissingCovariate,
  OutOfBounds,
  IndefiniteKernel,
  NoConvergence,
  BoundarySolution,
  WindowTooLarge,
  DegenerateVariance,
  Undefined,
  ParseError,
  EmptyFile,
  InvalidConfig,
  StudyDegenerate,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidSeries: return "InvalidSeries";
    case ErrorCode::MissingCovariate: return "MissingCovariate";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::IndefiniteKernel: return "IndefiniteKernel";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BoundarySolution: return "BoundarySolution";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::Undefined: return "Undefined";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::StudyDegenerate: return "StudyDegenerate";
  }
  return "Unknown";
}

}  // namespace lobvol
