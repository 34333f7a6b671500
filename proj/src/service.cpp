#include "recode/service.hpp"

#include <httplib.h>

#include "recode/analytics.hpp"
#include "recode/error.hpp"
#include "recode/evaluation.hpp"

namespace recode {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

ApiResponse ok(const ojson& doc, int status = 200) { return ApiResponse{status, doc.dump(2) + "\n"}; }

ApiResponse failure(const Error& e) {
  ojson doc;
  doc["error_kind"] = std::string(to_string(e.kind()));
  doc["message"] = e.message();
  doc["details"] = e.details();
  return ApiResponse{http_status(e.kind()), doc.dump(2) + "\n"};
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    auto doc = json::parse(body);
    if (!doc.is_object()) throw Error(ErrorKind::ConfigError, "request body must be a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, std::string("request body is not JSON: ") + e.what());
  }
}

std::string optional_string(const json& doc, const char* key, std::string fallback = {}) {
  if (!doc.contains(key) || doc[key].is_null()) return fallback;
  if (!doc[key].is_string()) {
    throw Error(ErrorKind::ConfigError, std::string("field '") + key + "' must be a string",
                {{"field", key}});
  }
  return doc[key].get<std::string>();
}

std::string url_decode(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      out.push_back(static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

ojson code_or_null(const std::optional<RecoveryCode>& code) {
  return code ? ojson(render_code(*code)) : ojson(nullptr);
}

}  // namespace

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotFound:
      return 404;
    case ErrorKind::ProtocolViolation:
    case ErrorKind::IncompleteSession:
    case ErrorKind::IncompleteSet:
      return 409;
    case ErrorKind::Timeout:
    case ErrorKind::RateLimited:
    case ErrorKind::ProviderRejection:
    case ErrorKind::MissingFixture:
    case ErrorKind::MissingSubdimension:
    case ErrorKind::OutOfRange:
    case ErrorKind::TotalMismatch:
    case ErrorKind::MissingCode:
      return 502;
    case ErrorKind::CorruptRecord:
      return 500;
    default:
      return 400;
  }
}

nlohmann::ordered_json session_document(const Session& session) {
  ojson doc;
  doc["session_id"] = session.id();
  doc["condition"] = std::string(to_string(session.condition()));
  doc["phase"] = std::string(to_string(session.phase()));
  doc["context"] = session.context() ? ojson(std::string(context_id(*session.context())))
                                     : ojson(nullptr);
  doc["applied_code"] = code_or_null(session.applied_code());
  doc["reflection_code"] = code_or_null(session.reflection_code());
  doc["awaiting_reply"] = session.awaiting_reply();
  auto turns = ojson::array();
  for (const auto& turn : session.turns()) {
    ojson row;
    row["index"] = turn.index;
    row["role"] = std::string(to_string(turn.role));
    row["phase"] = std::string(to_string(turn.phase));
    row["text"] = turn.text;
    turns.push_back(std::move(row));
  }
  doc["turns"] = std::move(turns);
  return doc;
}

Service::Service(ServiceConfig config)
    : config_(std::move(config)), store_(config_.data_dir), server_(std::make_unique<httplib::Server>()) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    auto out = dispatch(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server_->Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server_->Get(R"(/.*)", forward);
  server_->Post(R"(/.*)", forward);
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void Service::run() { server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

ApiResponse Service::dispatch(const std::string& method, const std::string& raw_path,
                              const std::string& body) {
  const auto path = url_decode(raw_path);
  std::vector<std::string> parts;
  for (std::size_t start = 1; start <= path.size();) {
    auto end = path.find('/', start);
    if (end == std::string::npos) end = path.size();
    if (end > start) parts.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  try {
    if (method == "POST" && parts.size() == 1 && parts[0] == "sessions") return create_session(body);
    if (parts.size() >= 2 && parts[0] == "sessions") {
      const auto& id = parts[1];
      if (method == "GET" && parts.size() == 2) return get_session(id);
      if (method == "POST" && parts.size() == 3) {
        if (parts[2] == "message") return post_message(id, body, false);
        if (parts[2] == "flag-error") return post_message(id, body, true);
        if (parts[2] == "retry") return retry(id);
        if (parts[2] == "close") return close_session(id);
      }
    }
    if (method == "GET" && parts.size() == 2 && parts[0] == "transcripts") {
      return get_transcript(parts[1]);
    }
    if (method == "POST" && parts.size() == 1 && parts[0] == "evaluate") return evaluate(body);
    if (method == "GET" && parts.size() == 2 && parts[0] == "reports" && parts[1] == "latest") {
      return latest_report();
    }
    return failure(Error(ErrorKind::NotFound, "no route " + method + " " + path));
  } catch (const Error& e) {
    return failure(e);
  } catch (const std::exception& e) {
    ojson doc{{"error_kind", "Internal"}, {"message", e.what()}, {"details", ojson::object()}};
    return ApiResponse{500, doc.dump(2) + "\n"};
  }
}

const GatewayConfig& Service::gateway_for(const std::string& provider) const {
  auto p = parse_provider(provider);
  if (!p) throw Error(ErrorKind::ConfigError, "unknown provider '" + provider + "'", {{"field", "provider"}});
  return *p == Provider::Mock ? config_.mock : config_.http;
}

std::shared_ptr<Service::Live> Service::find(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorKind::NotFound, "unknown session " + id);
  return it->second;
}

void Service::snapshot(const Live& live) {
  store_.save_session_snapshot(live.session->id(), session_document(*live.session));
}

ApiResponse Service::create_session(const std::string& body) {
  const auto req = parse_body(body);
  const auto condition = parse_condition(optional_string(req, "condition"));
  if (!condition) throw Error(ErrorKind::ConfigError, "condition must be A or B", {{"field", "condition"}});
  const auto provider = optional_string(req, "provider", "mock");
  const auto& gateway = gateway_for(provider);

  EngineConfig engine = config_.engine;
  const auto context_text = optional_string(req, "context");
  if (!context_text.empty()) {
    auto context = parse_context(context_text);
    if (!context) throw Error(ErrorKind::ConfigError, "context must be C1..C4", {{"field", "context"}});
    engine.context = *context;
  }
  engine.script_id = optional_string(req, "script", engine.script_id);
  if (req.contains("experiment_run")) {
    if (!req["experiment_run"].is_boolean()) {
      throw Error(ErrorKind::ConfigError, "experiment_run must be a boolean", {{"field", "experiment_run"}});
    }
    engine.experiment_run = req["experiment_run"].get<bool>();
  }
  if (gateway.provider == Provider::Mock && *condition == Condition::B && !engine.context &&
      engine.script_id.empty()) {
    throw Error(ErrorKind::ConfigError,
                "mock condition B sessions need a context or script to select fixture replies");
  }

  auto live = std::make_shared<Live>();
  live->provider = provider;
  live->session = std::make_unique<Session>(*condition, engine, fresh_agent(gateway));
  std::lock_guard lock(live->mutex);
  {
    std::lock_guard map_lock(sessions_mutex_);
    sessions_[live->session->id()] = live;
  }
  std::string agent_text;
  if (auto queued = live->session->queued_user_turn()) {
    try {
      agent_text = recode::exchange(*live->session, *queued);
    } catch (const Error&) {
      snapshot(*live);
      throw;
    }
  }
  snapshot(*live);
  auto doc = session_document(*live->session);
  doc["agent_text"] = agent_text.empty() ? ojson(nullptr) : ojson(agent_text);
  return ok(doc, 201);
}

ApiResponse Service::post_message(const std::string& id, const std::string& body, bool flag) {
  auto live = find(id);
  const auto req = parse_body(body);
  std::string text = optional_string(req, "text");
  if (flag && text.empty()) text = std::string(kErrorSentence);

  std::lock_guard lock(live->mutex);
  auto& session = *live->session;
  if (flag && !detect_error_flag(text, session.config().error_patterns)) {
    throw Error(ErrorKind::ConfigError, "flag-error text does not match any error pattern");
  }
  const auto action = session.submit_user_message(text);
  if (action.kind == EngineAction::Kind::Reject) {
    throw Error(ErrorKind::ProtocolViolation, action.reason,
                {{"phase", std::string(to_string(action.phase))},
                 {"retry", "POST /sessions/" + id + "/retry"}});
  }
  snapshot(*live);
  return complete_locked(*live);
}

ApiResponse Service::retry(const std::string& id) {
  auto live = find(id);
  std::lock_guard lock(live->mutex);
  return complete_locked(*live);
}

ApiResponse Service::complete_locked(Live& live) {
  auto& session = *live.session;
  const auto& id = session.id();
  std::string agent_text;
  try {
    agent_text = session.complete_pending();
  } catch (const Error& e) {
    if (!is_gateway_error(e.kind())) throw;
    auto details = e.details();
    details["retry"] = "POST /sessions/" + id + "/retry";
    throw Error(e.kind(), e.message(), std::move(details));
  }
  snapshot(live);
  auto doc = session_document(session);
  ojson out;
  out["session_id"] = session.id();
  out["agent_text"] = agent_text;
  out["phase"] = doc["phase"];
  out["context"] = doc["context"];
  out["applied_code"] = doc["applied_code"];
  out["reflection_code"] = doc["reflection_code"];
  return ok(out);
}

ApiResponse Service::close_session(const std::string& id) {
  auto live = find(id);
  std::lock_guard lock(live->mutex);
  auto& session = *live->session;
  if (session.phase() != Phase::Closed) session.close();
  snapshot(*live);
  const auto transcript = finalize_transcript(session);
  const auto dir = store_.save_transcript(transcript, live->provider);
  ojson out;
  out["transcript_code"] = transcript.code;
  out["run_id"] = dir.filename().string();
  return ok(out);
}

ApiResponse Service::get_session(const std::string& id) {
  auto live = find(id);
  std::lock_guard lock(live->mutex);
  return ok(session_document(*live->session));
}

ApiResponse Service::get_transcript(const std::string& code) {
  parse_transcript_code(code);
  return ApiResponse{200, store_.transcript_document(code)};
}

ApiResponse Service::evaluate(const std::string& body) {
  const auto req = parse_body(body);
  const auto code = optional_string(req, "transcript_code");
  if (code.empty()) throw Error(ErrorKind::ConfigError, "transcript_code is required", {{"field", "transcript_code"}});
  const auto transcript = store_.load_transcript(code);
  const auto record = evaluate_transcript(transcript, gateway_for(optional_string(req, "provider", "mock")));
  store_.save_scores(record);
  return ok(to_json(record));
}

ApiResponse Service::latest_report() {
  const auto records = store_.latest_scores();
  if (records.empty()) throw Error(ErrorKind::NotFound, "no stored scores");
  std::vector<RubricScore> scores;
  for (const auto& r : records) scores.push_back(r.score);
  const auto report = build_report(scores);
  const auto text = render_report(report);
  const auto csv = report_to_csv(report);
  store_.save_report(text, csv);
  ojson out;
  out["text"] = text;
  out["csv"] = csv;
  out["overall"] = overall_line(report).empty() ? ojson(nullptr) : ojson(overall_line(report));
  return ok(out);
}

}  // namespace recode
