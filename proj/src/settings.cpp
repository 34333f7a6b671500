#include "recode/settings.hpp"

#include <cstdlib>
#include <sstream>

#include "recode/storage.hpp"
#include "recode/util.hpp"

namespace recode {
namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::ConfigError, key + " must be a number, got '" + v + "'", {{"key", key}});
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int i = std::stoi(v, &used);
    if (used == v.size()) return i;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::ConfigError, key + " must be an integer, got '" + v + "'", {{"key", key}});
}

std::string env_name(const std::string& key) { return "RECODE_" + [&] {
  std::string s = key;
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}(); }

}  // namespace

const std::map<std::string, std::string>& Settings::defaults() {
  static const std::map<std::string, std::string> d = {
      {"data_dir", "data"},
      {"fixtures", RECODE_DEFAULT_FIXTURE_DIR},
      {"provider", "mock"},
      {"endpoint", ""},
      {"model", ""},
      {"credential_env", "RECODE_API_KEY"},
      {"temperature", ""},
      {"timeout", "60"},
      {"max_retries", "2"},
      {"retry_backoff_ms", "250"},
      {"lexicon", ""},
      {"error_patterns", ""},
      {"host", "127.0.0.1"},
      {"port", "8765"},
  };
  return d;
}

std::map<std::string, std::string> Settings::parse_config(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::ConfigError, "config line " + std::to_string(line_no) + ": expected key = value",
                  {{"line", line_no}});
    }
    const std::string key(trim(body.substr(0, eq)));
    if (!defaults().count(key)) {
      throw Error(ErrorKind::ConfigError, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'",
                  {{"line", line_no}, {"key", key}});
    }
    out[key] = std::string(trim(body.substr(eq + 1)));
  }
  return out;
}

Settings Settings::resolve(const std::map<std::string, std::string>& flags,
                           const std::filesystem::path& config_path, const EnvLookup& env) {
  Settings s;
  for (const auto& [k, v] : defaults()) s.values_[k] = {v, "default"};
  if (!config_path.empty()) {
    for (const auto& [k, v] : parse_config(read_file(config_path))) s.values_[k] = {v, "config"};
  }
  for (const auto& [k, v] : defaults()) {
    (void)v;
    if (auto value = env(env_name(k))) s.values_[k] = {*value, "env"};
  }
  for (const auto& [k, v] : flags) {
    if (!defaults().count(k)) throw Error(ErrorKind::ConfigError, "unknown setting '" + k + "'");
    s.values_[k] = {v, "flag"};
  }
  return s;
}

Settings Settings::resolve(const std::map<std::string, std::string>& flags,
                           const std::filesystem::path& config_path) {
  return resolve(flags, config_path, [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  });
}

const std::string& Settings::get(const std::string& key) const { return values_.at(key).first; }
const std::string& Settings::source(const std::string& key) const { return values_.at(key).second; }

GatewayConfig Settings::gateway(Provider provider) const {
  GatewayConfig g;
  g.provider = provider;
  g.endpoint = get("endpoint");
  g.model = get("model");
  g.credential_env = get("credential_env");
  if (!get("temperature").empty()) g.temperature = to_double("temperature", get("temperature"));
  g.timeout_seconds = to_double("timeout", get("timeout"));
  g.max_retries = to_int("max_retries", get("max_retries"));
  g.retry_backoff_ms = to_int("retry_backoff_ms", get("retry_backoff_ms"));
  if (provider == Provider::Mock) {
    g.fixtures = std::make_shared<FixturePack>(FixturePack::load_tree(get("fixtures")));
  }
  return g;
}

EngineConfig Settings::engine() const {
  EngineConfig e;
  if (!get("lexicon").empty()) e.lexicon = Lexicon::load(get("lexicon"));
  std::string_view extra = get("error_patterns");
  while (!extra.empty()) {
    const auto bar = extra.find('|');
    const auto pattern = trim(extra.substr(0, bar));
    if (!pattern.empty()) e.error_patterns.emplace_back(pattern);
    if (bar == std::string_view::npos) break;
    extra.remove_prefix(bar + 1);
  }
  return e;
}

std::string Settings::snapshot() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k + "=" + v.first + "\n";
  }
  return out;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedCode:
    case ErrorKind::InconsistentCode:
      return 3;
    case ErrorKind::EmptyPrompt:
    case ErrorKind::NoSignal:
      return 4;
    case ErrorKind::ProtocolViolation:
    case ErrorKind::EmptyMessage:
    case ErrorKind::IncompleteSession:
      return 5;
    case ErrorKind::ConfigError:
      return 6;
    case ErrorKind::Timeout:
    case ErrorKind::RateLimited:
    case ErrorKind::ProviderRejection:
    case ErrorKind::MissingFixture:
      return 7;
    case ErrorKind::CodeShapeError:
    case ErrorKind::MissingSubdimension:
    case ErrorKind::OutOfRange:
    case ErrorKind::TotalMismatch:
    case ErrorKind::MissingCode:
      return 8;
    case ErrorKind::IncompleteSet:
      return 9;
    case ErrorKind::NotFound:
    case ErrorKind::CorruptRecord:
      return 10;
  }
  return 11;
}

}  // namespace recode
