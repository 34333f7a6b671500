#pragma once

// Filesystem store:
//   runs/<run_id>/manifest.json
//   runs/<run_id>/transcript.json   (+ transcript.txt plain export)
//   runs/<run_id>/scores.json
//   reports/report.txt, reports/report.csv
//   sessions/<session_id>.json      (live service snapshots)
// run_id is "<CA_C1>-<seq>" with a zero-padded per-code sequence; lookups by
// transcript code resolve to the highest sequence.

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "recode/evaluation.hpp"
#include "recode/transcript.hpp"

namespace recode {

struct RunManifest {
  std::string run_id;
  std::string created_at;  // UTC, ISO 8601
  Condition condition = Condition::A;
  ContextTask context = ContextTask::C1;
  std::string provider;
  std::string config_snapshot;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

nlohmann::ordered_json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& doc);

std::string utc_timestamp();

class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  /// Creates a new run directory for the transcript and returns its path.
  std::filesystem::path save_transcript(const Transcript& t, std::string_view provider = "mock",
                                        std::string_view config_snapshot = {});
  /// Accepts a transcript code (latest run) or a path to a transcript file.
  /// Throws NotFound or CorruptRecord.
  Transcript load_transcript(std::string_view code_or_path) const;
  /// Stored document bytes for the latest run of `code`.
  std::string transcript_document(std::string_view code) const;

  /// Writes scores.json into the latest run for the record's transcript code.
  std::filesystem::path save_scores(const ScoreRecord& record);
  ScoreRecord load_scores(std::string_view code_or_path) const;
  /// Latest scored run per transcript code, in code order.
  std::vector<ScoreRecord> latest_scores() const;

  RunManifest load_manifest(std::string_view run_id) const;
  /// Run id of the latest run for `code`, if any.
  std::optional<std::string> latest_run(std::string_view code) const;

  void save_report(std::string_view text, std::string_view csv);
  std::string load_report() const;

  void save_session_snapshot(std::string_view session_id, const nlohmann::ordered_json& doc);

 private:
  std::filesystem::path run_dir(std::string_view run_id) const;
  std::filesystem::path resolve(std::string_view code_or_path, const char* file) const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

/// Reads a whole file; throws NotFound.
std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace recode
