#include "recode/storage.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "recode/error.hpp"

namespace recode {
namespace fs = std::filesystem;
namespace {

std::string code_to_dirname(std::string_view code) {
  std::string s(code);
  for (auto& ch : s) {
    if (ch == ':') ch = '_';
  }
  return s;
}

// Splits "CB_C3-0007" into ("CB:C3", 7).
std::optional<std::pair<std::string, int>> split_run_id(const std::string& run_id) {
  const auto dash = run_id.rfind('-');
  if (dash == std::string::npos || dash + 1 >= run_id.size()) return std::nullopt;
  std::string code = run_id.substr(0, dash);
  for (auto& ch : code) {
    if (ch == '_') ch = ':';
  }
  try {
    parse_transcript_code(code);
    std::size_t used = 0;
    const int seq = std::stoi(run_id.substr(dash + 1), &used);
    if (used != run_id.size() - dash - 1) return std::nullopt;
    return std::make_pair(code, seq);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

nlohmann::json parse_document(const std::string& bytes, const fs::path& path) {
  try {
    return nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::CorruptRecord, path.string() + " is not valid JSON: " + e.what(),
                {{"field", "(document)"}, {"path", path.string()}});
  }
}

bool looks_like_path(std::string_view s) {
  return s.find('/') != std::string_view::npos || s.find('.') != std::string_view::npos;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "no such file: " + path.string(), {{"path", path.string()}});
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  fs::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json doc;
  doc["run_id"] = m.run_id;
  doc["created_at"] = m.created_at;
  doc["condition"] = std::string(to_string(m.condition));
  doc["context"] = std::string(context_id(m.context));
  doc["provider"] = m.provider;
  doc["config_snapshot"] = m.config_snapshot;
  return doc;
}

RunManifest manifest_from_json(const nlohmann::json& doc) {
  auto field = [&](const char* key) {
    if (!doc.is_object() || !doc.contains(key) || !doc[key].is_string()) {
      throw Error(ErrorKind::CorruptRecord, std::string("manifest field '") + key + "' missing",
                  {{"field", key}});
    }
    return doc[key].get<std::string>();
  };
  RunManifest m;
  m.run_id = field("run_id");
  m.created_at = field("created_at");
  auto condition = parse_condition(field("condition"));
  if (!condition) throw Error(ErrorKind::CorruptRecord, "bad manifest condition", {{"field", "condition"}});
  m.condition = *condition;
  auto context = parse_context(field("context"));
  if (!context) throw Error(ErrorKind::CorruptRecord, "bad manifest context", {{"field", "context"}});
  m.context = *context;
  m.provider = field("provider");
  m.config_snapshot = field("config_snapshot");
  return m;
}

Store::Store(fs::path root) : root_(std::move(root)) {}

fs::path Store::run_dir(std::string_view run_id) const { return root_ / "runs" / std::string(run_id); }

std::optional<std::string> Store::latest_run(std::string_view code) const {
  const auto runs = root_ / "runs";
  if (!fs::is_directory(runs)) return std::nullopt;
  std::optional<std::pair<int, std::string>> best;
  for (const auto& entry : fs::directory_iterator(runs)) {
    if (!entry.is_directory()) continue;
    const auto name = entry.path().filename().string();
    auto parsed = split_run_id(name);
    if (!parsed || parsed->first != code) continue;
    if (!best || parsed->second > best->first) best = std::make_pair(parsed->second, name);
  }
  if (!best) return std::nullopt;
  return best->second;
}

fs::path Store::resolve(std::string_view code_or_path, const char* file) const {
  if (looks_like_path(code_or_path)) return fs::path(std::string(code_or_path));
  parse_transcript_code(code_or_path);
  auto run = latest_run(code_or_path);
  if (!run) {
    throw Error(ErrorKind::NotFound, "no stored run for " + std::string(code_or_path),
                {{"code", std::string(code_or_path)}});
  }
  return run_dir(*run) / file;
}

fs::path Store::save_transcript(const Transcript& t, std::string_view provider,
                                std::string_view config_snapshot) {
  std::lock_guard lock(mutex_);
  int seq = 1;
  if (auto run = latest_run(t.code)) seq = split_run_id(*run)->second + 1;
  char suffix[16];
  std::snprintf(suffix, sizeof suffix, "-%04d", seq);
  const std::string run_id = code_to_dirname(t.code) + suffix;
  const auto dir = run_dir(run_id);

  RunManifest manifest{run_id, utc_timestamp(), t.condition, t.context, std::string(provider),
                       std::string(config_snapshot)};
  write_file(dir / "transcript.json", dump_document(to_json(t)));
  write_file(dir / "transcript.txt", to_plain_text(t));
  write_file(dir / "manifest.json", dump_document(to_json(manifest)));
  return dir;
}

Transcript Store::load_transcript(std::string_view code_or_path) const {
  std::lock_guard lock(mutex_);
  const auto path = resolve(code_or_path, "transcript.json");
  return transcript_from_json(parse_document(read_file(path), path));
}

std::string Store::transcript_document(std::string_view code) const {
  std::lock_guard lock(mutex_);
  return read_file(resolve(code, "transcript.json"));
}

fs::path Store::save_scores(const ScoreRecord& record) {
  std::lock_guard lock(mutex_);
  const auto path = resolve(record.score.transcript_code, "scores.json");
  write_file(path, dump_document(to_json(record)));
  return path;
}

ScoreRecord Store::load_scores(std::string_view code_or_path) const {
  std::lock_guard lock(mutex_);
  const auto path = resolve(code_or_path, "scores.json");
  return score_record_from_json(parse_document(read_file(path), path));
}

std::vector<ScoreRecord> Store::latest_scores() const {
  std::lock_guard lock(mutex_);
  std::map<std::string, std::pair<int, fs::path>> latest;
  const auto runs = root_ / "runs";
  if (fs::is_directory(runs)) {
    for (const auto& entry : fs::directory_iterator(runs)) {
      const auto parsed = split_run_id(entry.path().filename().string());
      if (!parsed || !fs::exists(entry.path() / "scores.json")) continue;
      auto it = latest.find(parsed->first);
      if (it == latest.end() || it->second.first < parsed->second) {
        latest[parsed->first] = {parsed->second, entry.path() / "scores.json"};
      }
    }
  }
  std::vector<ScoreRecord> out;
  for (const auto& [code, entry] : latest) {
    out.push_back(score_record_from_json(parse_document(read_file(entry.second), entry.second)));
  }
  return out;
}

RunManifest Store::load_manifest(std::string_view run_id) const {
  std::lock_guard lock(mutex_);
  const auto path = run_dir(run_id) / "manifest.json";
  return manifest_from_json(parse_document(read_file(path), path));
}

void Store::save_report(std::string_view text, std::string_view csv) {
  std::lock_guard lock(mutex_);
  write_file(root_ / "reports" / "report.txt", text);
  write_file(root_ / "reports" / "report.csv", csv);
}

std::string Store::load_report() const {
  std::lock_guard lock(mutex_);
  return read_file(root_ / "reports" / "report.txt");
}

void Store::save_session_snapshot(std::string_view session_id, const nlohmann::ordered_json& doc) {
  std::lock_guard lock(mutex_);
  write_file(root_ / "sessions" / (std::string(session_id) + ".json"), dump_document(doc));
}

}  // namespace recode
