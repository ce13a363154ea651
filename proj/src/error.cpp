#include "newsrag/error.hpp"

namespace newsrag {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidUtf8: return "INVALID_UTF8";
    case ErrorCode::MalformedLine: return "MALFORMED_LINE";
    case ErrorCode::MissingHeaderField: return "MISSING_HEADER_FIELD";
    case ErrorCode::EmptyTranscript: return "EMPTY_TRANSCRIPT";
    case ErrorCode::InvalidMetadata: return "INVALID_METADATA";
    case ErrorCode::InvalidTimestamp: return "INVALID_TIMESTAMP";
    case ErrorCode::InvalidPolicy: return "INVALID_POLICY";
    case ErrorCode::EmptyInput: return "EMPTY_INPUT";
    case ErrorCode::EndpointUnavailable: return "ENDPOINT_UNAVAILABLE";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::BatchTooLarge: return "BATCH_TOO_LARGE";
    case ErrorCode::TextTooLong: return "TEXT_TOO_LONG";
    case ErrorCode::ZeroVector: return "ZERO_VECTOR";
    case ErrorCode::NonFiniteVector: return "NON_FINITE_VECTOR";
    case ErrorCode::CorruptSnapshot: return "CORRUPT_SNAPSHOT";
    case ErrorCode::VersionUnsupported: return "VERSION_UNSUPPORTED";
    case ErrorCode::NoPairsFound: return "NO_PAIRS_FOUND";
    case ErrorCode::EmptyQuestion: return "EMPTY_QUESTION";
    case ErrorCode::TooManyContexts: return "TOO_MANY_CONTEXTS";
    case ErrorCode::IndexEmpty: return "INDEX_EMPTY";
    case ErrorCode::EmptyText: return "EMPTY_TEXT";
    case ErrorCode::EmptyGroundTruth: return "EMPTY_GROUND_TRUTH";
    case ErrorCode::EmptyAnswer: return "EMPTY_ANSWER";
    case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::IoError: return "IO_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace newsrag
