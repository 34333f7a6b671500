#include "recode/codes.hpp"

#include <cctype>
#include <sstream>

#include "recode/error.hpp"

namespace recode {
namespace {

constexpr std::array<std::string_view, 5> kConscientiousness = {
    "organised", "reliable", "careful", "persevering", "responsible"};
constexpr std::array<std::string_view, 5> kAgreeableness = {
    "kind", "trusting", "cooperative", "warm", "sympathetic"};
constexpr std::array<std::string_view, 4> kOpenness = {
    "imaginative", "curious", "creative", "broad-minded"};
constexpr std::array<std::string_view, 5> kExtraversion = {
    "talkative", "assertive", "energetic", "sociable", "active"};

// Indexed by context.
const std::array<TraitProfile, 4> kTraits = {{
    {Trait::Conscientiousness, 'C', "Conscientiousness", kConscientiousness},
    {Trait::Agreeableness, 'A', "Agreeableness", kAgreeableness},
    {Trait::Openness, 'O', "Openness", kOpenness},
    {Trait::Extraversion, 'E', "Extraversion", kExtraversion},
}};

// Extraversion, Agreeableness, Conscientiousness, Openness.
const std::array<TraitProfile, 4> kSheetOrder = {kTraits[3], kTraits[1], kTraits[0], kTraits[2]};

constexpr std::array<ToneLabel, 4> kTones = {{
    {1, "Polite"},
    {2, "Warm"},
    {3, "Conversational"},
    {4, "Engaging"},
}};

constexpr std::array<RecoverySteps, 4> kRecoveries = {{
    {1, {"Identify error in an organised way.", "Reassure the user responsibly.",
         "Continue with perseverance."}},
    {2, {"Identify error cooperatively.", "Reassure the user kindly.", "Continue warmly."}},
    {3, {"Identify error curiously.", "Reassure the user broad-mindedly.",
         "Continue creatively."}},
    {4, {"Identify error actively.", "Reassure the user energetically.", "Continue sociably."}},
}};

constexpr std::array<std::string_view, 4> kContextIds = {"C1", "C2", "C3", "C4"};
constexpr std::array<std::string_view, 4> kContextLabels = {
    "Correcting grammar", "Emotional support", "Brainstorming", "Learning a concept"};
constexpr std::array<std::string_view, 4> kCanonical = {
    "{C1; C; T1; R1}", "{C2; A; T2; R2}", "{C3; O; T3; R3}", "{C4; E; T4; R4}"};

}  // namespace

std::string_view context_id(ContextTask c) { return kContextIds[index_of(c)]; }
std::string_view context_label(ContextTask c) { return kContextLabels[index_of(c)]; }

std::optional<ContextTask> parse_context(std::string_view id) {
  for (auto c : kAllContexts) {
    if (context_id(c) == id) return c;
  }
  return std::nullopt;
}

std::string_view RecoveryCode::context_label() const { return recode::context_label(context_); }
const TraitProfile& RecoveryCode::trait() const { return kTraits[index_of(context_)]; }
const ToneLabel& RecoveryCode::tone() const { return kTones[index_of(context_)]; }
const RecoverySteps& RecoveryCode::recovery() const { return kRecoveries[index_of(context_)]; }
std::string_view RecoveryCode::canonical() const { return kCanonical[index_of(context_)]; }

const RecoveryCode& lookup_code(ContextTask context) {
  static constexpr std::array<RecoveryCode, 4> registry = {
      RecoveryCode(ContextTask::C1), RecoveryCode(ContextTask::C2),
      RecoveryCode(ContextTask::C3), RecoveryCode(ContextTask::C4)};
  return registry[index_of(context)];
}

std::span<const RecoveryCode> all_codes() {
  return {&lookup_code(ContextTask::C1), 4};
}

const RecoveryCode& parse_code(std::string_view text) {
  std::string s;
  s.reserve(text.size());
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  auto malformed = [&] {
    return Error(ErrorKind::MalformedCode, "not a recovery code: '" + std::string(text) + "'");
  };
  // {Cn;X;Tn;Rn}
  if (s.size() != 12 || s.front() != '{' || s.back() != '}' || s[3] != ';' || s[5] != ';' ||
      s[8] != ';' || s[1] != 'C' || s[6] != 'T' || s[9] != 'R') {
    throw malformed();
  }
  auto is_digit = [](char ch) { return ch >= '0' && ch <= '9'; };
  auto is_upper = [](char ch) { return ch >= 'A' && ch <= 'Z'; };
  if (!is_digit(s[2]) || !is_upper(s[4]) || !is_digit(s[7]) || !is_digit(s[10])) {
    throw malformed();
  }

  const int context = s[2] - '0';
  const int tone = s[7] - '0';
  const int recovery = s[10] - '0';
  const char letter = s[4];
  if (context < 1 || context > 4) {
    throw Error(ErrorKind::InconsistentCode, "no context C" + std::to_string(context));
  }
  const RecoveryCode& entry = lookup_code(static_cast<ContextTask>(context - 1));
  if (letter != entry.trait().letter || tone != entry.tone().index ||
      recovery != entry.recovery().index) {
    throw Error(ErrorKind::InconsistentCode,
                "'" + std::string(text) + "' contradicts " + std::string(entry.canonical()));
  }
  return entry;
}

std::string render_code(const RecoveryCode& code) { return std::string(code.canonical()); }

std::optional<RecoveryCode> find_first_code(std::string_view text) {
  for (std::size_t open = text.find('{'); open != std::string_view::npos;
       open = text.find('{', open + 1)) {
    const auto close = text.find('}', open);
    if (close == std::string_view::npos) break;
    // Allow generous internal whitespace but not whole paragraphs.
    if (close - open > 64) continue;
    try {
      return parse_code(text.substr(open, close - open + 1));
    } catch (const Error&) {
    }
  }
  return std::nullopt;
}

std::span<const TraitProfile> trait_profiles() { return kSheetOrder; }

std::string render_framework_document() {
  std::ostringstream out;
  out << "Recovery Code\n\n";
  out << "| Context | Big Five Trait | Tone | Recovery | Code |\n";
  out << "|---|---|---|---|---|\n";
  for (const auto& code : all_codes()) {
    out << "| " << context_id(code.context()) << ": " << code.context_label() << " | "
        << code.trait().name << " (" << code.trait().letter << ") | T" << code.tone().index
        << ": " << code.tone().name << " | ";
    const auto& steps = code.recovery().steps;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (i) out << " ";
      out << i + 1 << ". " << steps[i];
    }
    out << " | " << code.canonical() << " |\n";
  }
  return out.str();
}

}  // namespace recode
