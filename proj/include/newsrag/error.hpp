#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace newsrag {

enum class ErrorCode {
  InvalidUtf8,
  MalformedLine,
  MissingHeaderField,
  EmptyTranscript,
  InvalidMetadata,
  InvalidTimestamp,
  InvalidPolicy,
  EmptyInput,
  EndpointUnavailable,
  DimensionMismatch,
  BatchTooLarge,
  TextTooLong,
  ZeroVector,
  NonFiniteVector,
  CorruptSnapshot,
  VersionUnsupported,
  NoPairsFound,
  EmptyQuestion,
  TooManyContexts,
  IndexEmpty,
  EmptyText,
  EmptyGroundTruth,
  EmptyAnswer,
  InvalidConfig,
  IoError,
};

// Machine-readable code name, e.g. ErrorCode::ZeroVector -> "ZERO_VECTOR".
const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Remote endpoint failure. 429 and 5xx are retriable, other 4xx are not.
class EndpointError : public Error {
 public:
  EndpointError(int status, bool retriable, const std::string& message)
      : Error(ErrorCode::EndpointUnavailable, message),
        status_(status),
        retriable_(retriable) {}

  int status() const noexcept { return status_; }
  bool retriable() const noexcept { return retriable_; }

 private:
  int status_;
  bool retriable_;
};

// Grammar violation in a line-oriented input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line_no, const std::string& message)
      : Error(code, message), line_no_(line_no) {}

  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

}  // namespace newsrag
