#pragma once

// Operator settings resolved from, in order of precedence: command-line
// flags, RECODE_<KEY> environment variables, a flat `key = value` config
// file, and built-in defaults.

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "recode/engine.hpp"
#include "recode/error.hpp"
#include "recode/gateway.hpp"

namespace recode {

class Settings {
 public:
  using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

  /// Recognized keys and their defaults.
  static const std::map<std::string, std::string>& defaults();

  /// `config_path` may be empty. Throws ConfigError on unknown keys or
  /// malformed lines.
  static Settings resolve(const std::map<std::string, std::string>& flags,
                          const std::filesystem::path& config_path, const EnvLookup& env);
  /// Uses the process environment.
  static Settings resolve(const std::map<std::string, std::string>& flags,
                          const std::filesystem::path& config_path);

  static std::map<std::string, std::string> parse_config(std::string_view text);

  const std::string& get(const std::string& key) const;
  /// Where the value came from: "flag", "env", "config" or "default".
  const std::string& source(const std::string& key) const;

  /// Gateway settings for `provider`; fixture packs are loaded for mock.
  GatewayConfig gateway(Provider provider) const;
  EngineConfig engine() const;

  /// key=value lines without secrets, for run manifests.
  std::string snapshot() const;

 private:
  std::map<std::string, std::pair<std::string, std::string>> values_;  // key -> (value, source)
};

/// 0 is success; 1 a replay mismatch; 2 a usage error; 3.. one per error class.
int exit_code(ErrorKind kind);

}  // namespace recode
