#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "recode/gateway.hpp"
#include "recode/transcript.hpp"

namespace recode {

enum class Dimension { RecoveryQuality, ToneAlignment, Appropriateness };

enum class SubDimension {
  IdentifyingTheError,
  ReassuringTheUser,
  ProvidingExplanation,
  ContinuedConversation,
  ToneAlignmentWithTask,
  ToneNaturalness,
  ContextualRelevance,
  PersonalityAppropriateness,
  ToneAppropriateness,
};

inline constexpr std::size_t kSubDimensionCount = 9;
inline constexpr std::array<Dimension, 3> kAllDimensions = {
    Dimension::RecoveryQuality, Dimension::ToneAlignment, Dimension::Appropriateness};
inline constexpr std::array<SubDimension, kSubDimensionCount> kAllSubDimensions = {
    SubDimension::IdentifyingTheError,        SubDimension::ReassuringTheUser,
    SubDimension::ProvidingExplanation,       SubDimension::ContinuedConversation,
    SubDimension::ToneAlignmentWithTask,      SubDimension::ToneNaturalness,
    SubDimension::ContextualRelevance,        SubDimension::PersonalityAppropriateness,
    SubDimension::ToneAppropriateness};

constexpr std::size_t index_of(SubDimension s) { return static_cast<std::size_t>(s); }
constexpr std::size_t index_of(Dimension d) { return static_cast<std::size_t>(d); }

Dimension dimension_of(SubDimension s);
std::span<const SubDimension> subdimensions_of(Dimension d);
/// Rubric wording, e.g. "Identifying the error".
std::string_view label(SubDimension s);
/// Stable identifier, e.g. "identifying_the_error".
std::string_view key(SubDimension s);
std::optional<SubDimension> subdimension_from_key(std::string_view key);
std::string_view label(Dimension d);
std::string_view key(Dimension d);

inline constexpr int kMinLikert = 1;
inline constexpr int kMaxLikert = 5;
inline constexpr int kMaxTotal = kMaxLikert * static_cast<int>(kSubDimensionCount);

struct RubricScore {
  std::string transcript_code;
  std::array<int, kSubDimensionCount> scores{};
  int raw_total = 0;

  int operator[](SubDimension s) const { return scores[index_of(s)]; }
  int dimension_total(Dimension d) const;

  /// Builds a score with raw_total filled in. Throws OutOfRange.
  static RubricScore make(std::string transcript_code,
                          const std::array<int, kSubDimensionCount>& scores);

  friend bool operator==(const RubricScore&, const RubricScore&) = default;
};

struct ScoreRecord {
  RubricScore score;
  std::string judge_text;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

/// The judge instructions for one transcript. Throws CodeShapeError unless
/// `transcript_code` is well-formed and belongs to `condition`.
std::string build_evaluator_prompt(Condition condition, std::string_view transcript_code);

std::string build_info_sheet(Condition condition);

/// The empty rubric table the judge fills in.
std::string rubric_document();

/// Title under which the judge sees the info sheet, e.g. "CB evaluator information sheet".
std::string info_sheet_title(Condition condition);

/// Everything the judge receives for one transcript.
PromptBundle build_judge_bundle(const Transcript& transcript);

/// Reads `<label>: <n>/5` lines or markdown table rows, a transcript code and
/// an optional `<n>/45` total. Throws MissingSubdimension, OutOfRange,
/// TotalMismatch or MissingCode.
RubricScore parse_rubric_response(std::string_view text);

/// Flattened `label: n/5` form accepted by parse_rubric_response.
std::string render_rubric_response(const RubricScore& score);

/// One judge call on a fresh binding. Parse errors keep the raw reply in
/// details()["judge_text"].
ScoreRecord evaluate_transcript(const Transcript& transcript, const GatewayConfig& gateway);

// {transcript_code, scores: {<key>: n}, raw_total, judge_text}
nlohmann::ordered_json to_json(const ScoreRecord& record);
/// Throws CorruptRecord naming the offending field.
ScoreRecord score_record_from_json(const nlohmann::json& doc);

/// One row per transcript, one column per sub-dimension, then raw_total.
std::string scores_to_csv(const std::vector<RubricScore>& scores);
/// Accepts scores_to_csv output or the transposed layout (one row per
/// sub-dimension, one column per transcript). Throws CorruptRecord.
std::vector<RubricScore> scores_from_csv(std::string_view csv);

}  // namespace recode
