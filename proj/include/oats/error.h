#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oats {

enum class ErrorCode {
  kIo,
  kMalformedRecord,
  kDuplicateDocId,
  kInvalidUtf8,
  kHeaderMismatch,
  kParse,
  kDuplicateTerm,
  kTruncatedFile,
  kNonFiniteComponent,
  kDimensionMismatch,
  kZeroNorm,
  kEndpointUnreachable,
  kSchemaViolation,
  kBackendUnreachable,
  kProtocolViolation,
  kInvalidPattern,
  kDuplicateQuestion,
  kUnresolvedDisagreement,
  kConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

// All recoverable failures in the library are reported as oats::Error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kDuplicateDocId: return "DuplicateDocId";
    case ErrorCode::kInvalidUtf8: return "InvalidUtf8";
    case ErrorCode::kHeaderMismatch: return "HeaderMismatch";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kDuplicateTerm: return "DuplicateTerm";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kNonFiniteComponent: return "NonFiniteComponent";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroNorm: return "ZeroNorm";
    case ErrorCode::kEndpointUnreachable: return "EndpointUnreachable";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kBackendUnreachable: return "BackendUnreachable";
    case ErrorCode::kProtocolViolation: return "ProtocolViolation";
    case ErrorCode::kInvalidPattern: return "InvalidPattern";
    case ErrorCode::kDuplicateQuestion: return "DuplicateQuestion";
    case ErrorCode::kUnresolvedDisagreement: return "UnresolvedDisagreement";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Error";
}

}  // namespace oats
