#include "recode/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "recode/error.hpp"
#include "recode/util.hpp"

namespace recode {
namespace {

class MockBinding final : public GatewayBinding {
 public:
  explicit MockBinding(std::shared_ptr<const FixturePack> pack) : pack_(std::move(pack)) {}

 protected:
  std::string do_complete(const PromptBundle& bundle) override {
    count_attempt();
    const auto& script = bundle.metadata.script_id;
    const std::size_t turn = bundle.history.size();
    const std::string* reply = pack_ ? pack_->find(script, turn) : nullptr;
    if (!reply) {
      throw Error(ErrorKind::MissingFixture,
                  "no fixture reply for script '" + script + "' turn " + std::to_string(turn),
                  {{"script", script}, {"turn", turn}});
    }
    return *reply;
  }

 private:
  std::shared_ptr<const FixturePack> pack_;
};

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::ConfigError, "endpoint must be an absolute URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpBinding final : public GatewayBinding {
 public:
  explicit HttpBinding(GatewayConfig config) : config_(std::move(config)) {}

 protected:
  std::string do_complete(const PromptBundle& bundle) override {
    const auto [base, path] = split_endpoint(config_.endpoint);
    const std::string body = build_chat_request(bundle, config_);

    httplib::Headers headers;
    if (!config_.credential_env.empty()) {
      const char* key = std::getenv(config_.credential_env.c_str());
      if (!key || !*key) {
        throw Error(ErrorKind::ConfigError,
                    "credential variable " + config_.credential_env + " is not set");
      }
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
    std::string last_failure;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0 && config_.retry_backoff_ms > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(config_.retry_backoff_ms * attempt));
      }
      count_attempt();
      httplib::Client client(base);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      auto res = client.Post(path, headers, body, "application/json");
      if (!res) {
        last_failure = httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429) {
        throw Error(ErrorKind::RateLimited, "provider rate limit", {{"status", res->status}});
      }
      if (res->status >= 500) {
        last_failure = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status >= 400) {
        throw Error(ErrorKind::ProviderRejection, "provider rejected request: " + res->body,
                    {{"status", res->status}, {"provider_message", res->body}});
      }
      return parse_chat_response(res->body);
    }
    throw Error(ErrorKind::Timeout,
                "no response after " + std::to_string(config_.max_retries + 1) +
                    " attempts: " + last_failure,
                {{"attempts", config_.max_retries + 1}});
  }

 private:
  GatewayConfig config_;
};

}  // namespace

void FixturePack::add(std::string script, std::size_t turn, std::string text) {
  replies_[std::move(script)][turn] = std::move(text);
}

FixturePack FixturePack::load_dir(const std::filesystem::path& dir) {
  FixturePack pack;
  if (!std::filesystem::is_directory(dir)) return pack;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::ifstream in(file);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
      const auto script = doc.at("script").get<std::string>();
      for (const auto& reply : doc.at("replies")) {
        pack.add(script, reply.at("turn").get<std::size_t>(), reply.at("text").get<std::string>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::CorruptRecord, "bad fixture file " + file.string() + ": " + e.what(),
                  {{"field", file.string()}});
    }
  }
  return pack;
}

FixturePack FixturePack::load_tree(const std::filesystem::path& root) {
  FixturePack pack = load_dir(root);
  for (const char* sub : {"agents", "judge"}) {
    for (auto& [script, turns] : load_dir(root / sub).replies_) {
      for (auto& [turn, text] : turns) pack.add(script, turn, std::move(text));
    }
  }
  return pack;
}

const std::string* FixturePack::find(std::string_view script, std::size_t turn) const {
  auto it = replies_.find(script);
  if (it == replies_.end()) return nullptr;
  auto jt = it->second.find(turn);
  return jt == it->second.end() ? nullptr : &jt->second;
}

std::string_view to_string(Provider p) { return p == Provider::Mock ? "mock" : "http"; }

std::optional<Provider> parse_provider(std::string_view s) {
  if (s == "mock") return Provider::Mock;
  if (s == "http") return Provider::Http;
  return std::nullopt;
}

void GatewayConfig::validate() const {
  if (!(timeout_seconds > 0)) throw Error(ErrorKind::ConfigError, "timeout must be positive");
  if (max_retries < 0) throw Error(ErrorKind::ConfigError, "max_retries must be >= 0");
  if (retry_backoff_ms < 0) throw Error(ErrorKind::ConfigError, "retry backoff must be >= 0");
  if (provider == Provider::Http) {
    if (endpoint.empty()) throw Error(ErrorKind::ConfigError, "http provider needs an endpoint");
    split_endpoint(endpoint);
  }
}

GatewayBinding::GatewayBinding() : id_(random_id()) {}

std::string GatewayBinding::complete(const PromptBundle& bundle) {
  if (bundle.history.empty() || bundle.history.back().role != Role::User) {
    throw Error(ErrorKind::ProtocolViolation, "completion needs a history ending in a USER turn");
  }
  std::lock_guard lock(mutex_);
  return do_complete(bundle);
}

std::shared_ptr<GatewayBinding> fresh_agent(const GatewayConfig& config) {
  config.validate();
  if (config.provider == Provider::Mock) return std::make_shared<MockBinding>(config.fixtures);
  return std::make_shared<HttpBinding>(config);
}

std::string complete(const PromptBundle& bundle, const GatewayConfig& config) {
  return fresh_agent(config)->complete(bundle);
}

std::string build_chat_request(const PromptBundle& bundle, const GatewayConfig& config) {
  nlohmann::ordered_json req;
  if (!config.model.empty()) req["model"] = config.model;
  auto messages = nlohmann::ordered_json::array();
  if (bundle.instruction) {
    messages.push_back({{"role", "system"}, {"content", *bundle.instruction}});
  }
  for (const auto& turn : bundle.history) {
    messages.push_back(
        {{"role", turn.role == Role::User ? "user" : "assistant"}, {"content", turn.text}});
  }
  req["messages"] = std::move(messages);
  if (config.temperature) req["temperature"] = *config.temperature;
  return req.dump();
}

std::string parse_chat_response(std::string_view body) {
  try {
    const auto doc = nlohmann::json::parse(body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ProviderRejection,
                std::string("unreadable provider response: ") + e.what(),
                {{"provider_message", std::string(body.substr(0, 500))}});
  }
}

}  // namespace recode
