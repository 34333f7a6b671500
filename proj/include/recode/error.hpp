#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace recode {

// Every failure the library reports carries one of these kinds. The CLI maps
// kinds to exit codes and the service maps them to HTTP statuses.
enum class ErrorKind {
  // recovery codes
  MalformedCode,
  InconsistentCode,
  // classifier
  EmptyPrompt,
  NoSignal,
  // engine
  ProtocolViolation,
  EmptyMessage,
  IncompleteSession,
  ConfigError,
  // gateway
  Timeout,
  RateLimited,
  ProviderRejection,
  MissingFixture,
  // evaluation
  CodeShapeError,
  MissingSubdimension,
  OutOfRange,
  TotalMismatch,
  MissingCode,
  // analytics
  IncompleteSet,
  // storage
  NotFound,
  CorruptRecord,
};

std::string_view to_string(ErrorKind kind);

bool is_gateway_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        nlohmann::json details = nlohmann::json::object());

  ErrorKind kind() const noexcept { return kind_; }
  const nlohmann::json& details() const noexcept { return details_; }
  /// what() without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
  nlohmann::json details_;
};

}  // namespace recode
