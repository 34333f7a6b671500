#pragma once

// Local HTTP facade over the engine, judge and report builder.
//
//   POST /sessions                 {condition, provider?, context?, script?, experiment_run?}
//   POST /sessions/{id}/message    {text}
//   POST /sessions/{id}/flag-error {text?}
//   POST /sessions/{id}/retry      re-sends a reply that failed at the gateway
//   POST /sessions/{id}/close
//   GET  /sessions/{id}
//   GET  /transcripts/{code}
//   POST /evaluate                 {transcript_code, provider?}
//   GET  /reports/latest
//
// Errors are {error_kind, message, details}.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "recode/engine.hpp"
#include "recode/gateway.hpp"
#include "recode/storage.hpp"

namespace httplib {
class Server;
}

namespace recode {

struct ServiceConfig {
  std::filesystem::path data_dir = "data";
  GatewayConfig mock;  // used when a request names provider "mock"
  GatewayConfig http;  // used when a request names provider "http"
  EngineConfig engine;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// HTTP status for an error kind.
int http_status(ErrorKind kind);

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  /// Transport-free entry point; the HTTP routes forward here.
  ApiResponse dispatch(const std::string& method, const std::string& path,
                       const std::string& body);

  /// Binds `host`; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void run();
  void stop();

  Store& store() { return store_; }

 private:
  struct Live {
    std::mutex mutex;
    std::unique_ptr<Session> session;
    std::string provider;
  };

  ApiResponse create_session(const std::string& body);
  ApiResponse post_message(const std::string& id, const std::string& body, bool flag);
  ApiResponse retry(const std::string& id);
  ApiResponse complete_locked(Live& live);
  ApiResponse close_session(const std::string& id);
  ApiResponse get_session(const std::string& id);
  ApiResponse get_transcript(const std::string& code);
  ApiResponse evaluate(const std::string& body);
  ApiResponse latest_report();

  std::shared_ptr<Live> find(const std::string& id);
  const GatewayConfig& gateway_for(const std::string& provider) const;
  void snapshot(const Live& live);

  ServiceConfig config_;
  Store store_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Live>> sessions_;
  std::unique_ptr<httplib::Server> server_;
};

/// Session state as returned by the API and stored in snapshots.
nlohmann::ordered_json session_document(const Session& session);

}  // namespace recode
