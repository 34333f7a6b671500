#include "recode/error.hpp"

namespace recode {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedCode: return "MalformedCode";
    case ErrorKind::InconsistentCode: return "InconsistentCode";
    case ErrorKind::EmptyPrompt: return "EmptyPrompt";
    case ErrorKind::NoSignal: return "NoSignal";
    case ErrorKind::ProtocolViolation: return "ProtocolViolation";
    case ErrorKind::EmptyMessage: return "EmptyMessage";
    case ErrorKind::IncompleteSession: return "IncompleteSession";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::ProviderRejection: return "ProviderRejection";
    case ErrorKind::MissingFixture: return "MissingFixture";
    case ErrorKind::CodeShapeError: return "CodeShapeError";
    case ErrorKind::MissingSubdimension: return "MissingSubdimension";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::TotalMismatch: return "TotalMismatch";
    case ErrorKind::MissingCode: return "MissingCode";
    case ErrorKind::IncompleteSet: return "IncompleteSet";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::CorruptRecord: return "CorruptRecord";
  }
  return "Unknown";
}

bool is_gateway_error(ErrorKind kind) {
  return kind == ErrorKind::Timeout || kind == ErrorKind::RateLimited ||
         kind == ErrorKind::ProviderRejection || kind == ErrorKind::MissingFixture;
}

Error::Error(ErrorKind kind, const std::string& message, nlohmann::json details)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      message_(message),
      details_(std::move(details)) {}

}  // namespace recode
