#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "recode/gateway.hpp"
#include "support.hpp"

using namespace recode;
using testing_support::mock_gateway;

namespace {

PromptBundle user_bundle(std::string script, std::vector<std::string> texts) {
  PromptBundle b;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    b.history.push_back(Turn{i % 2 == 0 ? Role::User : Role::Agent, texts[i], Phase::Active, i});
  }
  b.metadata.script_id = std::move(script);
  return b;
}

// Scripted chat-completions endpoint on a loopback port.
class FakeProvider {
 public:
  explicit FakeProvider(std::vector<std::pair<int, std::string>> responses)
      : responses_(std::move(responses)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto n = hits_++;
      last_auth_ = req.get_header_value("Authorization");
      last_body_ = req.body;
      const auto& [status, body] = responses_[std::min<std::size_t>(n, responses_.size() - 1)];
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeProvider() {
    server_.stop();
    thread_.join();
  }

  GatewayConfig config() const {
    GatewayConfig g;
    g.provider = Provider::Http;
    g.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    g.model = "test-model";
    g.credential_env = "RECODE_TEST_CREDENTIAL";
    g.timeout_seconds = 5;
    g.max_retries = 2;
    g.retry_backoff_ms = 0;
    return g;
  }

  int hits() const { return hits_; }
  std::string last_auth() const { return last_auth_; }
  std::string last_body() const { return last_body_; }

 private:
  std::vector<std::pair<int, std::string>> responses_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  std::string last_auth_;
  std::string last_body_;
};

const std::string kOk = R"({"choices":[{"message":{"role":"assistant","content":"hello from the model"}}]})";
const char* kSecret = "sk-test-do-not-log-4711";

class HttpGateway : public ::testing::Test {
 protected:
  void SetUp() override { setenv("RECODE_TEST_CREDENTIAL", kSecret, 1); }
  void TearDown() override { unsetenv("RECODE_TEST_CREDENTIAL"); }
};

}  // namespace

TEST(Gateway, MockReplaysFixture) {
  auto agent = fresh_agent(mock_gateway());
  const auto reply = agent->complete(user_bundle("CB:C1", {"training"}));
  EXPECT_EQ(reply.rfind("I've read and understood", 0), 0u);
}

TEST(Gateway, MockMissingFixture) {
  auto agent = fresh_agent(mock_gateway(FixturePack{}));
  EXPECT_ERROR_KIND(agent->complete(user_bundle("CB:C1", {"training"})), MissingFixture);
}

TEST(Gateway, MockIsDeterministicAndStartsFromZero) {
  const auto cfg = mock_gateway();
  auto a = fresh_agent(cfg);
  auto b = fresh_agent(cfg);
  const auto first = user_bundle("CA:C2", {"task"});
  const auto second = user_bundle("CA:C2", {"task", "reply", "I don't think that is right. Please try again."});
  EXPECT_EQ(a->complete(first), b->complete(first));
  EXPECT_EQ(a->complete(second), b->complete(second));
  auto c = fresh_agent(cfg);
  EXPECT_EQ(c->complete(first), a->complete(first));
}

TEST(Gateway, FreshBindingsAreIndependent) {
  const auto cfg = mock_gateway();
  auto a = fresh_agent(cfg);
  auto b = fresh_agent(cfg);
  EXPECT_NE(a->id(), b->id());
  EXPECT_TRUE(a->claim());
  EXPECT_FALSE(a->claim());
  EXPECT_TRUE(b->claim());
}

TEST(Gateway, CompletionNeedsTrailingUserTurn) {
  auto agent = fresh_agent(mock_gateway());
  EXPECT_ERROR_KIND(agent->complete(PromptBundle{}), ProtocolViolation);
  EXPECT_ERROR_KIND(agent->complete(user_bundle("CA:C1", {"a", "b"})), ProtocolViolation);
}

TEST(Gateway, ConfigValidation) {
  GatewayConfig g;
  g.timeout_seconds = 0;
  EXPECT_ERROR_KIND(g.validate(), ConfigError);
  g.timeout_seconds = 1;
  g.max_retries = -1;
  EXPECT_ERROR_KIND(g.validate(), ConfigError);
  g.max_retries = 0;
  EXPECT_NO_THROW(g.validate());
  g.provider = Provider::Http;
  EXPECT_ERROR_KIND(g.validate(), ConfigError);
  EXPECT_ERROR_KIND(fresh_agent(g), ConfigError);
}

TEST(Gateway, FixturePackLoadRejectsBadJson) {
  testing_support::TempDir dir;
  std::ofstream(dir.path() / "bad.json") << "{not json";
  EXPECT_ERROR_KIND(FixturePack::load_dir(dir.path()), CorruptRecord);
}

TEST(Gateway, ChatWireFormat) {
  GatewayConfig g;
  g.provider = Provider::Http;
  g.model = "m";
  g.temperature = 0.5;
  auto b = user_bundle("x", {"task", "answer", "again"});
  b.instruction = "be polite";
  const auto req = nlohmann::json::parse(build_chat_request(b, g));
  EXPECT_EQ(req["model"], "m");
  EXPECT_EQ(req["temperature"], 0.5);
  ASSERT_EQ(req["messages"].size(), 4u);
  EXPECT_EQ(req["messages"][0]["role"], "system");
  EXPECT_EQ(req["messages"][0]["content"], "be polite");
  EXPECT_EQ(req["messages"][1]["role"], "user");
  EXPECT_EQ(req["messages"][2]["role"], "assistant");
  EXPECT_EQ(req["messages"][3]["content"], "again");

  EXPECT_EQ(parse_chat_response(kOk), "hello from the model");
  EXPECT_ERROR_KIND(parse_chat_response("{}"), ProviderRejection);
}

TEST_F(HttpGateway, SuccessSendsBearerCredential) {
  FakeProvider fake({{200, kOk}});
  auto agent = fresh_agent(fake.config());
  EXPECT_EQ(agent->complete(user_bundle("x", {"hi"})), "hello from the model");
  EXPECT_EQ(fake.last_auth(), std::string("Bearer ") + kSecret);
  EXPECT_EQ(fake.last_body().find(kSecret), std::string::npos);
  EXPECT_EQ(agent->attempts(), 1u);
}

TEST_F(HttpGateway, ServerErrorsAreRetried) {
  FakeProvider fake({{500, "boom"}, {503, "busy"}, {200, kOk}});
  auto agent = fresh_agent(fake.config());
  EXPECT_EQ(agent->complete(user_bundle("x", {"hi"})), "hello from the model");
  EXPECT_EQ(fake.hits(), 3);
  EXPECT_EQ(agent->attempts(), 3u);
}

TEST_F(HttpGateway, PersistentServerErrorsTimeOut) {
  FakeProvider fake({{500, "boom"}});
  auto agent = fresh_agent(fake.config());
  EXPECT_ERROR_KIND(agent->complete(user_bundle("x", {"hi"})), Timeout);
  EXPECT_EQ(fake.hits(), 3);
}

TEST_F(HttpGateway, RateLimitIsNotRetried) {
  FakeProvider fake({{429, "slow down"}, {200, kOk}});
  auto agent = fresh_agent(fake.config());
  EXPECT_ERROR_KIND(agent->complete(user_bundle("x", {"hi"})), RateLimited);
  EXPECT_EQ(fake.hits(), 1);
}

TEST_F(HttpGateway, RejectionCarriesProviderMessage) {
  FakeProvider fake({{400, R"({"error":"bad model"})"}, {200, kOk}});
  auto agent = fresh_agent(fake.config());
  try {
    agent->complete(user_bundle("x", {"hi"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ProviderRejection);
    EXPECT_NE(e.details()["provider_message"].get<std::string>().find("bad model"), std::string::npos);
    EXPECT_EQ(std::string(e.what()).find(kSecret), std::string::npos);
  }
  EXPECT_EQ(fake.hits(), 1);
}

TEST_F(HttpGateway, UnreachableEndpointTimesOutAfterThreeAttempts) {
  GatewayConfig g;
  g.provider = Provider::Http;
  g.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  g.credential_env = "RECODE_TEST_CREDENTIAL";
  g.timeout_seconds = 1;
  g.max_retries = 2;
  g.retry_backoff_ms = 0;
  auto agent = fresh_agent(g);
  try {
    agent->complete(user_bundle("x", {"hi"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Timeout);
    EXPECT_EQ(e.details()["attempts"], 3);
    EXPECT_EQ(std::string(e.what()).find(kSecret), std::string::npos);
  }
  EXPECT_EQ(agent->attempts(), 3u);
}

TEST_F(HttpGateway, MissingCredentialIsConfigError) {
  unsetenv("RECODE_TEST_CREDENTIAL");
  FakeProvider fake({{200, kOk}});
  auto agent = fresh_agent(fake.config());
  EXPECT_ERROR_KIND(agent->complete(user_bundle("x", {"hi"})), ConfigError);
  EXPECT_EQ(fake.hits(), 0);
}
