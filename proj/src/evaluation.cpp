#include "recode/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <sstream>

#include "recode/error.hpp"
#include "recode/templates.hpp"
#include "recode/util.hpp"

namespace recode {
namespace {

constexpr std::array<std::string_view, kSubDimensionCount> kLabels = {
    "Identifying the error",    "Reassuring the user",         "Providing explanation",
    "Continued conversation",   "Tone alignment with task",    "Tone naturalness",
    "Contextual relevance",     "Personality appropriateness", "Tone appropriateness"};

constexpr std::array<std::string_view, kSubDimensionCount> kKeys = {
    "identifying_the_error",   "reassuring_the_user",         "providing_explanation",
    "continued_conversation",  "tone_alignment_with_task",    "tone_naturalness",
    "contextual_relevance",    "personality_appropriateness", "tone_appropriateness"};

constexpr std::array<std::string_view, 3> kDimensionLabels = {
    "Recovery quality", "Tone alignment", "Appropriateness"};
constexpr std::array<std::string_view, 3> kDimensionKeys = {
    "recovery_quality", "tone_alignment", "appropriateness"};

constexpr std::array<SubDimension, 4> kRecoveryQuality = {
    SubDimension::IdentifyingTheError, SubDimension::ReassuringTheUser,
    SubDimension::ProvidingExplanation, SubDimension::ContinuedConversation};
constexpr std::array<SubDimension, 2> kToneAlignment = {SubDimension::ToneAlignmentWithTask,
                                                        SubDimension::ToneNaturalness};
constexpr std::array<SubDimension, 3> kAppropriateness = {
    SubDimension::ContextualRelevance, SubDimension::PersonalityAppropriateness,
    SubDimension::ToneAppropriateness};

constexpr std::string_view kPlaceholder = "[INSERT TRANSCRIPT CODE]";

// Lowercase words only: emphasis, punctuation and list numbering such as
// "2:" or "1." are dropped.
std::string normalize_label(std::string_view raw) {
  std::string words;
  bool pending_space = false;
  for (char ch : raw) {
    const auto u = static_cast<unsigned char>(ch);
    if (u < 0x80 && std::isalnum(u)) {
      if (pending_space && !words.empty()) words.push_back(' ');
      pending_space = false;
      words.push_back(static_cast<char>(std::tolower(u)));
    } else {
      pending_space = true;
    }
  }
  std::size_t start = 0;
  while (start < words.size() && std::isdigit(static_cast<unsigned char>(words[start]))) ++start;
  if (start > 0 && (start == words.size() || words[start] == ' ')) {
    words.erase(0, start == words.size() ? start : start + 1);
  }
  return words;
}

std::optional<SubDimension> match_label(std::string_view raw) {
  const auto norm = normalize_label(raw);
  for (auto s : kAllSubDimensions) {
    if (to_lower(kLabels[index_of(s)]) == norm) return s;
  }
  return std::nullopt;
}

// Label text preceding a score: for table rows the last non-empty cell.
std::string_view label_before(std::string_view prefix) {
  prefix = trim(prefix);
  while (!prefix.empty() && (prefix.back() == '|' || prefix.back() == '*' || prefix.back() == ' ')) {
    prefix.remove_suffix(1);
  }
  const auto bar = prefix.rfind('|');
  if (bar != std::string_view::npos) prefix = prefix.substr(bar + 1);
  return trim(prefix);
}

[[noreturn]] void corrupt(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::CorruptRecord, "score record field '" + field + "': " + why,
              {{"field", field}});
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.emplace_back(trim(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.emplace_back(trim(cur));
  return cells;
}

int parse_cell_int(const std::string& cell, const std::string& field) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(cell, &used);
    if (used != cell.size()) corrupt(field, "not an integer");
    return v;
  } catch (const std::logic_error&) {
    corrupt(field, "not an integer");
  }
}

}  // namespace

Dimension dimension_of(SubDimension s) {
  const auto i = index_of(s);
  if (i < 4) return Dimension::RecoveryQuality;
  if (i < 6) return Dimension::ToneAlignment;
  return Dimension::Appropriateness;
}

std::span<const SubDimension> subdimensions_of(Dimension d) {
  switch (d) {
    case Dimension::RecoveryQuality: return kRecoveryQuality;
    case Dimension::ToneAlignment: return kToneAlignment;
    case Dimension::Appropriateness: return kAppropriateness;
  }
  return {};
}

std::string_view label(SubDimension s) { return kLabels[index_of(s)]; }
std::string_view key(SubDimension s) { return kKeys[index_of(s)]; }
std::string_view label(Dimension d) { return kDimensionLabels[index_of(d)]; }
std::string_view key(Dimension d) { return kDimensionKeys[index_of(d)]; }

std::optional<SubDimension> subdimension_from_key(std::string_view k) {
  for (auto s : kAllSubDimensions) {
    if (kKeys[index_of(s)] == k) return s;
  }
  return std::nullopt;
}

int RubricScore::dimension_total(Dimension d) const {
  int sum = 0;
  for (auto s : subdimensions_of(d)) sum += (*this)[s];
  return sum;
}

RubricScore RubricScore::make(std::string transcript_code,
                              const std::array<int, kSubDimensionCount>& scores) {
  RubricScore out;
  out.transcript_code = std::move(transcript_code);
  out.scores = scores;
  for (auto s : kAllSubDimensions) {
    const int v = scores[index_of(s)];
    if (v < kMinLikert || v > kMaxLikert) {
      throw Error(ErrorKind::OutOfRange,
                  std::string(label(s)) + " scored " + std::to_string(v) + ", expected 1-5",
                  {{"subdimension", std::string(key(s))}, {"value", v}});
    }
    out.raw_total += v;
  }
  return out;
}

std::string build_evaluator_prompt(Condition condition, std::string_view transcript_code) {
  const auto [code_condition, context] = parse_transcript_code(transcript_code);
  (void)context;
  if (code_condition != condition) {
    throw Error(ErrorKind::CodeShapeError,
                "transcript " + std::string(transcript_code) + " is not a condition " +
                    std::string(to_string(condition)) + " transcript");
  }
  std::string prompt(condition == Condition::A ? text::kEvaluatorPromptA
                                               : text::kEvaluatorPromptB);
  for (auto pos = prompt.find(kPlaceholder); pos != std::string::npos;
       pos = prompt.find(kPlaceholder, pos + transcript_code.size())) {
    prompt.replace(pos, kPlaceholder.size(), transcript_code);
  }
  return prompt;
}

std::string build_info_sheet(Condition condition) {
  if (condition == Condition::A) return std::string(text::kTraitSheet) + "\n";
  std::string sheet = "Prompt used for condition B.\n";
  sheet += "\xE2\x80\x98";  // ‘
  sheet += text::kTrainingPrompt;
  sheet += "\xE2\x80\x99\n\n";  // ’
  sheet += text::kTraitSheet;
  sheet += "\n";
  return sheet;
}

std::string info_sheet_title(Condition condition) {
  return "C" + std::string(to_string(condition)) + " evaluator information sheet";
}

std::string rubric_document() {
  std::ostringstream out;
  out << "| Dimension | Subdimension | Score /5 |\n";
  out << "|---|---|---|\n";
  for (auto d : kAllDimensions) {
    bool first = true;
    for (auto s : subdimensions_of(d)) {
      out << "| ";
      if (first) out << index_of(d) + 1 << ": " << label(d);
      out << " | " << label(s) << " |  |\n";
      first = false;
    }
  }
  out << "| **Transcript code** | |  |\n";
  out << "| **Overall score** | | **/45** |\n";
  return out.str();
}

PromptBundle build_judge_bundle(const Transcript& transcript) {
  std::ostringstream attachments;
  auto attach = [&](const std::string& title, const std::string& body) {
    attachments << "=== " << title << " ===\n" << body;
    if (body.empty() || body.back() != '\n') attachments << '\n';
    attachments << '\n';
  };
  attach("Evaluation Rubric", rubric_document());
  attach(info_sheet_title(transcript.condition), build_info_sheet(transcript.condition));
  if (transcript.condition == Condition::B) attach("Recovery Code", render_framework_document());
  attach(transcript.code + " transcript", to_plain_text(transcript));

  PromptBundle bundle;
  bundle.instruction = build_evaluator_prompt(transcript.condition, transcript.code);
  auto body = attachments.str();
  while (!body.empty() && body.back() == '\n') body.pop_back();
  bundle.history.push_back(Turn{Role::User, std::move(body), Phase::Closed, 0});
  bundle.metadata.session_id = random_id();
  bundle.metadata.condition = transcript.condition;
  bundle.metadata.context = transcript.context;
  bundle.metadata.script_id = "judge/" + transcript.code;
  return bundle;
}

RubricScore parse_rubric_response(std::string_view text) {
  static const std::regex kScore(R"((\d+)\s*/\s*5(?!\d))");
  static const std::regex kTotal(R"((\d+)\s*/\s*45(?!\d))");
  static const std::regex kCode(R"(C([AB])\s*:\s*C([1-4]))");

  std::array<std::optional<int>, kSubDimensionCount> found;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    std::smatch m;
    if (!std::regex_search(line, m, kScore)) continue;
    const auto prefix = std::string_view(line).substr(0, static_cast<std::size_t>(m.position(0)));
    auto sub = match_label(label_before(prefix));
    if (!sub || found[index_of(*sub)]) continue;  // first occurrence wins
    const int value = std::stoi(m[1].str());
    if (value < kMinLikert || value > kMaxLikert) {
      throw Error(ErrorKind::OutOfRange,
                  std::string(label(*sub)) + " scored " + std::to_string(value) + "/5",
                  {{"subdimension", std::string(key(*sub))}, {"value", value}});
    }
    found[index_of(*sub)] = value;
  }

  std::vector<std::string> missing;
  for (auto s : kAllSubDimensions) {
    if (!found[index_of(s)]) missing.emplace_back(label(s));
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::MissingSubdimension, "no score for: " + list, {{"missing", missing}});
  }

  const std::string haystack(text);
  std::smatch code_match;
  if (!std::regex_search(haystack, code_match, kCode)) {
    throw Error(ErrorKind::MissingCode, "judge output names no transcript code");
  }
  const std::string code = "C" + code_match[1].str() + ":C" + code_match[2].str();

  std::array<int, kSubDimensionCount> scores{};
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = *found[i];
  auto score = RubricScore::make(code, scores);

  std::smatch total_match;
  if (std::regex_search(haystack, total_match, kTotal)) {
    const int stated = std::stoi(total_match[1].str());
    if (stated != score.raw_total) {
      throw Error(ErrorKind::TotalMismatch,
                  "stated total " + std::to_string(stated) + "/45 but scores sum to " +
                      std::to_string(score.raw_total),
                  {{"stated", stated}, {"computed", score.raw_total}});
    }
  }
  return score;
}

std::string render_rubric_response(const RubricScore& score) {
  std::ostringstream out;
  for (auto s : kAllSubDimensions) out << label(s) << ": " << score[s] << "/5\n";
  out << "Transcript code: " << score.transcript_code << "\n";
  out << "Overall score: " << score.raw_total << "/45\n";
  return out.str();
}

ScoreRecord evaluate_transcript(const Transcript& transcript, const GatewayConfig& gateway) {
  check_finalized(transcript);
  const auto bundle = build_judge_bundle(transcript);
  auto binding = fresh_agent(gateway);
  std::string reply = binding->complete(bundle);
  try {
    auto score = parse_rubric_response(reply);
    if (score.transcript_code != transcript.code) {
      throw Error(ErrorKind::MissingCode, "judge output names " + score.transcript_code +
                                              " instead of " + transcript.code);
    }
    return ScoreRecord{std::move(score), std::move(reply)};
  } catch (const Error& e) {
    auto details = e.details();
    details["judge_text"] = reply;
    throw Error(e.kind(), e.message(), std::move(details));
  }
}

nlohmann::ordered_json to_json(const ScoreRecord& record) {
  nlohmann::ordered_json doc;
  doc["transcript_code"] = record.score.transcript_code;
  nlohmann::ordered_json scores = nlohmann::ordered_json::object();
  for (auto s : kAllSubDimensions) scores[std::string(key(s))] = record.score[s];
  doc["scores"] = std::move(scores);
  doc["raw_total"] = record.score.raw_total;
  doc["judge_text"] = record.judge_text;
  return doc;
}

ScoreRecord score_record_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) corrupt("(root)", "expected an object");
  if (!doc.contains("transcript_code") || !doc["transcript_code"].is_string()) {
    corrupt("transcript_code", "expected a string");
  }
  const auto code = doc["transcript_code"].get<std::string>();
  try {
    parse_transcript_code(code);
  } catch (const Error& e) {
    corrupt("transcript_code", e.message());
  }
  if (!doc.contains("scores") || !doc["scores"].is_object()) corrupt("scores", "expected an object");
  const auto& scores = doc["scores"];
  std::array<int, kSubDimensionCount> values{};
  for (auto s : kAllSubDimensions) {
    const std::string field = "scores." + std::string(key(s));
    if (!scores.contains(key(s))) corrupt(field, "missing");
    const auto& v = scores[std::string(key(s))];
    if (!v.is_number_integer()) corrupt(field, "expected an integer");
    const int n = v.get<int>();
    if (n < kMinLikert || n > kMaxLikert) corrupt(field, "outside 1-5: " + std::to_string(n));
    values[index_of(s)] = n;
  }
  for (const auto& [k, v] : scores.items()) {
    (void)v;
    if (!subdimension_from_key(k)) corrupt("scores." + k, "unknown sub-dimension");
  }
  auto score = RubricScore::make(code, values);
  if (!doc.contains("raw_total") || !doc["raw_total"].is_number_integer()) {
    corrupt("raw_total", "expected an integer");
  }
  if (doc["raw_total"].get<int>() != score.raw_total) corrupt("raw_total", "does not match scores");
  if (!doc.contains("judge_text") || !doc["judge_text"].is_string()) {
    corrupt("judge_text", "expected a string");
  }
  return ScoreRecord{std::move(score), doc["judge_text"].get<std::string>()};
}

std::string scores_to_csv(const std::vector<RubricScore>& scores) {
  std::ostringstream out;
  out << "transcript_code";
  for (auto s : kAllSubDimensions) out << ',' << key(s);
  out << ",raw_total\n";
  for (const auto& score : scores) {
    out << score.transcript_code;
    for (auto s : kAllSubDimensions) out << ',' << score[s];
    out << ',' << score.raw_total << '\n';
  }
  return out.str();
}

std::vector<RubricScore> scores_from_csv(std::string_view csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(csv)};
  for (std::string line; std::getline(in, line);) {
    if (!trim(line).empty()) rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) corrupt("(header)", "empty table");
  const auto& header = rows.front();

  auto build = [](const std::string& code, const std::array<int, kSubDimensionCount>& values,
                  const std::string& field) {
    try {
      parse_transcript_code(code);
      return RubricScore::make(code, values);
    } catch (const Error& e) {
      corrupt(field, e.message());
    }
  };

  std::vector<RubricScore> out;
  if (header.front() == "transcript_code") {
    if (header.size() < kSubDimensionCount + 1) corrupt("(header)", "too few columns");
    std::array<std::size_t, kSubDimensionCount> column{};
    for (auto s : kAllSubDimensions) {
      auto it = std::find(header.begin(), header.end(), key(s));
      if (it == header.end()) corrupt(std::string(key(s)), "missing column");
      column[index_of(s)] = static_cast<std::size_t>(it - header.begin());
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() != header.size()) corrupt("row " + std::to_string(r), "wrong column count");
      std::array<int, kSubDimensionCount> values{};
      for (auto s : kAllSubDimensions) {
        values[index_of(s)] = parse_cell_int(row[column[index_of(s)]],
                                             row[0] + "." + std::string(key(s)));
      }
      out.push_back(build(row[0], values, row[0]));
    }
    return out;
  }

  // Transposed: header "Subdimension,CA:C1,...", one row per sub-dimension.
  if (header.size() < 2) corrupt("(header)", "expected transcript code columns");
  std::map<SubDimension, const std::vector<std::string>*> by_label;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto sub = match_label(rows[r][0]);
    if (!sub) {
      if (normalize_label(rows[r][0]) == "total" || normalize_label(rows[r][0]) == "raw total") {
        continue;
      }
      corrupt(rows[r][0], "unknown sub-dimension");
    }
    if (rows[r].size() != header.size()) corrupt(rows[r][0], "wrong column count");
    by_label[*sub] = &rows[r];
  }
  for (auto s : kAllSubDimensions) {
    if (!by_label.count(s)) corrupt(std::string(key(s)), "missing row");
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    std::array<int, kSubDimensionCount> values{};
    for (auto s : kAllSubDimensions) {
      values[index_of(s)] =
          parse_cell_int((*by_label[s])[c], header[c] + "." + std::string(key(s)));
    }
    out.push_back(build(header[c], values, header[c]));
  }
  return out;
}

}  // namespace recode
