#pragma once

// Provider-agnostic chat-completion boundary. The mock provider answers from
// fixture packs keyed by (script id, turn index); the http provider speaks a
// minimal chat-completions exchange.

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recode/transcript.hpp"

namespace recode {

struct BundleMetadata {
  std::string session_id;
  Condition condition = Condition::A;
  std::optional<ContextTask> context;
  /// Fixture key for the mock provider, e.g. "CB:C3" or "judge/CB:C3".
  std::string script_id;
};

struct PromptBundle {
  /// System-level channel: recovery directives or evaluator instructions.
  std::optional<std::string> instruction;
  std::vector<Turn> history;
  BundleMetadata metadata;
};

/// Replies indexed by script id, then by the transcript index of the reply.
class FixturePack {
 public:
  void add(std::string script, std::size_t turn, std::string text);
  /// Reads every *.json file in `dir`: {"script": ..., "replies": [{"turn", "text"}]}.
  static FixturePack load_dir(const std::filesystem::path& dir);
  /// Loads `dir` plus, if present, its `agents/` and `judge/` subdirectories.
  static FixturePack load_tree(const std::filesystem::path& root);

  const std::string* find(std::string_view script, std::size_t turn) const;
  bool empty() const { return replies_.empty(); }

 private:
  std::map<std::string, std::map<std::size_t, std::string>, std::less<>> replies_;
};

enum class Provider { Mock, Http };

std::string_view to_string(Provider p);
std::optional<Provider> parse_provider(std::string_view s);

struct GatewayConfig {
  Provider provider = Provider::Mock;
  std::shared_ptr<const FixturePack> fixtures;  // mock only

  std::string endpoint;         // http only, e.g. http://127.0.0.1:8080/v1/chat/completions
  std::string credential_env;   // name of the environment variable holding the key
  std::string model;
  std::optional<double> temperature;
  double timeout_seconds = 60.0;
  int max_retries = 2;
  int retry_backoff_ms = 250;

  /// Throws ConfigError if any field is out of range for the provider.
  void validate() const;
};

/// A provider-side conversation handle. Each binding is fresh: it shares no
/// identifiers or history with any other binding and serves calls one at a
/// time. An engine session claims its binding exclusively.
class GatewayBinding {
 public:
  virtual ~GatewayBinding() = default;

  const std::string& id() const { return id_; }

  /// Requires a non-empty history ending in a USER turn.
  std::string complete(const PromptBundle& bundle);

  /// Marks the binding as owned by one session; false if already owned.
  bool claim() { return !claimed_.exchange(true); }

  /// Transport attempts made so far, retries included.
  std::size_t attempts() const { return attempts_.load(); }

 protected:
  GatewayBinding();
  virtual std::string do_complete(const PromptBundle& bundle) = 0;
  void count_attempt() { ++attempts_; }

 private:
  std::string id_;
  std::mutex mutex_;
  std::atomic<bool> claimed_{false};
  std::atomic<std::size_t> attempts_{0};
};

/// New, independent binding for the configured provider.
std::shared_ptr<GatewayBinding> fresh_agent(const GatewayConfig& config);

/// One-shot completion on a fresh binding.
std::string complete(const PromptBundle& bundle, const GatewayConfig& config);

/// Request body the http provider posts (exposed for tests).
std::string build_chat_request(const PromptBundle& bundle, const GatewayConfig& config);
/// Extracts the reply text from a chat-completions response body.
std::string parse_chat_response(std::string_view body);

}  // namespace recode
