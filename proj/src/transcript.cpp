#include "recode/transcript.hpp"

#include <array>

#include "recode/error.hpp"

namespace recode {
namespace {

constexpr std::array<std::string_view, 8> kPhaseNames = {
    "Training", "AwaitActivation", "Active",     "ErrorFlagged",
    "Recovered", "Terminated",     "Reflection", "Closed"};

[[noreturn]] void corrupt(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::CorruptRecord, "transcript field '" + field + "': " + why,
              {{"field", field}});
}

const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) corrupt(key, "missing");
  return obj.at(key);
}

std::string require_string(const nlohmann::json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) corrupt(key, "expected a string");
  return v.get<std::string>();
}

std::optional<RecoveryCode> optional_code(const nlohmann::json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) corrupt(key, "expected a code string or null");
  try {
    return parse_code(v.get<std::string>());
  } catch (const Error& e) {
    corrupt(key, e.what());
  }
}

}  // namespace

std::string_view to_string(Condition c) { return c == Condition::A ? "A" : "B"; }

std::optional<Condition> parse_condition(std::string_view s) {
  if (s == "A") return Condition::A;
  if (s == "B") return Condition::B;
  return std::nullopt;
}

std::string_view to_string(Phase p) { return kPhaseNames[static_cast<std::size_t>(p)]; }

std::optional<Phase> parse_phase(std::string_view s) {
  for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
    if (kPhaseNames[i] == s) return static_cast<Phase>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Role r) { return r == Role::User ? "USER" : "AGENT"; }

std::string make_transcript_code(Condition condition, ContextTask context) {
  return "C" + std::string(to_string(condition)) + ":" + std::string(context_id(context));
}

std::pair<Condition, ContextTask> parse_transcript_code(std::string_view code) {
  if (code.size() == 5 && code[0] == 'C' && code[2] == ':') {
    auto condition = parse_condition(code.substr(1, 1));
    auto context = parse_context(code.substr(3, 2));
    if (condition && context) return {*condition, *context};
  }
  throw Error(ErrorKind::CodeShapeError, "bad transcript code '" + std::string(code) + "'");
}

void check_finalized(const Transcript& t) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::IncompleteSession, "transcript is not finalized: " + why);
  };
  std::pair<Condition, ContextTask> parsed;
  try {
    parsed = parse_transcript_code(t.code);
  } catch (const Error&) {
    fail("missing or malformed code");
  }
  if (parsed.first != t.condition || parsed.second != t.context) fail("code disagrees with fields");
  if (t.turns.empty()) fail("no turns");
  for (std::size_t i = 0; i < t.turns.size(); ++i) {
    const Role expected = i % 2 == 0 ? Role::User : Role::Agent;
    if (t.turns[i].role != expected || t.turns[i].index != i) fail("turns do not alternate");
  }
  if (t.turns.back().role != Role::Agent) fail("last turn unanswered");
}

nlohmann::ordered_json to_json(const Transcript& t) {
  nlohmann::ordered_json doc;
  doc["code"] = t.code;
  doc["condition"] = std::string(to_string(t.condition));
  doc["context"] = std::string(context_id(t.context));
  doc["applied_code"] = t.applied_code ? nlohmann::ordered_json(render_code(*t.applied_code))
                                       : nlohmann::ordered_json(nullptr);
  doc["reflection_code"] = t.reflection_code
                               ? nlohmann::ordered_json(render_code(*t.reflection_code))
                               : nlohmann::ordered_json(nullptr);
  auto turns = nlohmann::ordered_json::array();
  for (const auto& turn : t.turns) {
    nlohmann::ordered_json row;
    row["index"] = turn.index;
    row["role"] = std::string(to_string(turn.role));
    row["phase"] = std::string(to_string(turn.phase));
    row["text"] = turn.text;
    turns.push_back(std::move(row));
  }
  doc["turns"] = std::move(turns);
  return doc;
}

Transcript transcript_from_json(const nlohmann::json& doc) {
  Transcript t;
  t.code = require_string(doc, "code");
  auto condition = parse_condition(require_string(doc, "condition"));
  if (!condition) corrupt("condition", "expected A or B");
  t.condition = *condition;
  auto context = parse_context(require_string(doc, "context"));
  if (!context) corrupt("context", "expected C1..C4");
  t.context = *context;
  try {
    auto [code_condition, code_context] = parse_transcript_code(t.code);
    if (code_condition != t.condition || code_context != t.context) {
      corrupt("code", "disagrees with condition/context");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CorruptRecord) throw;
    corrupt("code", e.what());
  }
  t.applied_code = optional_code(doc, "applied_code");
  t.reflection_code = optional_code(doc, "reflection_code");

  const auto& turns = require(doc, "turns");
  if (!turns.is_array()) corrupt("turns", "expected an array");
  for (std::size_t i = 0; i < turns.size(); ++i) {
    const auto& row = turns[i];
    const std::string prefix = "turns[" + std::to_string(i) + "].";
    if (!row.is_object()) corrupt("turns[" + std::to_string(i) + "]", "expected an object");
    for (const char* key : {"index", "role", "phase", "text"}) {
      if (!row.contains(key)) corrupt(prefix + key, "missing");
    }
    if (!row["index"].is_number_unsigned() || row["index"].get<std::size_t>() != i) {
      corrupt(prefix + "index", "expected " + std::to_string(i));
    }
    Turn turn;
    turn.index = i;
    const auto role = row["role"].is_string() ? row["role"].get<std::string>() : "";
    if (role == "USER") {
      turn.role = Role::User;
    } else if (role == "AGENT") {
      turn.role = Role::Agent;
    } else {
      corrupt(prefix + "role", "expected USER or AGENT");
    }
    if ((i % 2 == 0) != (turn.role == Role::User)) corrupt(prefix + "role", "roles must alternate");
    auto phase = parse_phase(row["phase"].is_string() ? row["phase"].get<std::string>() : "");
    if (!phase) corrupt(prefix + "phase", "unknown phase");
    turn.phase = *phase;
    if (!row["text"].is_string()) corrupt(prefix + "text", "expected a string");
    turn.text = row["text"].get<std::string>();
    t.turns.push_back(std::move(turn));
  }
  return t;
}

std::string dump_document(const nlohmann::ordered_json& doc) { return doc.dump(2) + "\n"; }

std::string to_plain_text(const Transcript& t) {
  std::string out;
  for (const auto& turn : t.turns) {
    if (!out.empty()) out += "\n\n";
    out += to_string(turn.role);
    out += ": ";
    out += turn.text;
  }
  out += "\n";
  return out;
}

}  // namespace recode
