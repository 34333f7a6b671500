#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "recode/codes.hpp"

namespace recode {

/// A is the uncoded baseline, B the arm trained on the recovery code.
enum class Condition { A, B };

std::string_view to_string(Condition c);
std::optional<Condition> parse_condition(std::string_view s);

enum class Phase {
  Training,
  AwaitActivation,
  Active,
  ErrorFlagged,
  Recovered,
  Terminated,
  Reflection,
  Closed,
};

std::string_view to_string(Phase p);
std::optional<Phase> parse_phase(std::string_view s);

enum class Role { User, Agent };

std::string_view to_string(Role r);

struct Turn {
  Role role;
  std::string text;
  Phase phase;  // session phase when the turn was emitted
  std::size_t index;

  friend bool operator==(const Turn&, const Turn&) = default;
};

/// "CA:C1" .. "CB:C4".
std::string make_transcript_code(Condition condition, ContextTask context);

/// Throws CodeShapeError unless `code` has the shape C<A|B>:C<1-4>.
std::pair<Condition, ContextTask> parse_transcript_code(std::string_view code);

struct Transcript {
  std::string code;
  Condition condition = Condition::A;
  ContextTask context = ContextTask::C1;
  std::vector<Turn> turns;
  std::optional<RecoveryCode> applied_code;
  std::optional<RecoveryCode> reflection_code;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

/// Throws IncompleteSession when the transcript could not have come out of a
/// finalized session (bad code, empty or non-alternating turns).
void check_finalized(const Transcript& t);

// Structured document: code, condition, context, applied_code,
// reflection_code, turns[{index, role, phase, text}]. Key order is fixed so
// serialization is byte-stable.
nlohmann::ordered_json to_json(const Transcript& t);
/// Throws CorruptRecord naming the offending field.
Transcript transcript_from_json(const nlohmann::json& doc);

std::string dump_document(const nlohmann::ordered_json& doc);

/// "USER: ..." / "AGENT: ..." blocks separated by blank lines.
std::string to_plain_text(const Transcript& t);

}  // namespace recode
