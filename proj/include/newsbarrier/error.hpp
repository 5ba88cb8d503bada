#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace newsbarrier {

enum class ErrorCode {
  // corpus
  MissingField,
  MalformedTimestamp,
  MalformedRecord,
  IoError,
  AllRecordsMalformed,
  // remote
  AuthError,
  RateLimited,
  NetworkError,
  // barriers
  DimensionMismatch,
  KTooLarge,
  EmptyInput,
  HeaderMismatch,
  // propagation
  TooManyNodes,
  EmptyGraph,
  // topics
  EmptyVocabulary,
  TooFewDocs,
  KOutOfRange,
  DegenerateTerm,
  // service
  ValidationError,
  NotFound,
  ConfigError,
  BindError,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::MissingField: return "MissingField";
  case ErrorCode::MalformedTimestamp: return "MalformedTimestamp";
  case ErrorCode::MalformedRecord: return "MalformedRecord";
  case ErrorCode::IoError: return "IoError";
  case ErrorCode::AllRecordsMalformed: return "AllRecordsMalformed";
  case ErrorCode::AuthError: return "AuthError";
  case ErrorCode::RateLimited: return "RateLimited";
  case ErrorCode::NetworkError: return "NetworkError";
  case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  case ErrorCode::KTooLarge: return "KTooLarge";
  case ErrorCode::EmptyInput: return "EmptyInput";
  case ErrorCode::HeaderMismatch: return "HeaderMismatch";
  case ErrorCode::TooManyNodes: return "TooManyNodes";
  case ErrorCode::EmptyGraph: return "EmptyGraph";
  case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
  case ErrorCode::TooFewDocs: return "TooFewDocs";
  case ErrorCode::KOutOfRange: return "KOutOfRange";
  case ErrorCode::DegenerateTerm: return "DegenerateTerm";
  case ErrorCode::ValidationError: return "ValidationError";
  case ErrorCode::NotFound: return "NotFound";
  case ErrorCode::ConfigError: return "ConfigError";
  case ErrorCode::BindError: return "BindError";
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Single exception type for the whole library. `detail()` carries the
/// offending field name, path or parameter when there is one.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string detail)
      : std::runtime_error(std::string(to_string(code)) +
                           (detail.empty() ? "" : ": " + detail)),
        code_(code), detail_(std::move(detail)) {}

  explicit Error(ErrorCode code) : Error(code, std::string{}) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string &detail() const noexcept { return detail_; }

private:
  ErrorCode code_;
  std::string detail_;
};

} // namespace newsbarrier
