#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emocult {

enum class ErrorCode {
  // Input validation
  ParseError,
  DuplicateLemma,
  MissingPhrase,
  UnknownLemma,
  DimensionMismatch,
  NonFiniteVector,
  LengthMismatch,
  IntersectionTooSmall,
  MissingLemma,
  EmptyInput,
  DuplicateCell,
  MissingCell,
  InvalidRecord,
  InvalidScore,
  UnpairedQuestion,
  AnnotatorCount,
  InvalidConfig,
  // Computation
  ZeroNorm,
  DegenerateAxis,
  DegeneratePlane,
  NoValidCorrelations,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateLemma: return "DuplicateLemma";
    case ErrorCode::MissingPhrase: return "MissingPhrase";
    case ErrorCode::UnknownLemma: return "UnknownLemma";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteVector: return "NonFiniteVector";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IntersectionTooSmall: return "IntersectionTooSmall";
    case ErrorCode::MissingLemma: return "MissingLemma";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DuplicateCell: return "DuplicateCell";
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::InvalidScore: return "InvalidScore";
    case ErrorCode::UnpairedQuestion: return "UnpairedQuestion";
    case ErrorCode::AnnotatorCount: return "AnnotatorCount";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::DegenerateAxis: return "DegenerateAxis";
    case ErrorCode::DegeneratePlane: return "DegeneratePlane";
    case ErrorCode::NoValidCorrelations: return "NoValidCorrelations";
  }
  return "Unknown";
}

/// True for failures of the numerics on valid input (as opposed to bad input).
constexpr bool is_computation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroNorm:
    case ErrorCode::DegenerateAxis:
    case ErrorCode::DegeneratePlane:
    case ErrorCode::NoValidCorrelations:
      return true;
    default:
      return false;
  }
}

/// The single exception type thrown by the library; carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace emocult
