#include "recode/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "recode/gateway.hpp"
#include "recode/util.hpp"

namespace recode {
namespace {

// Lowercased alphanumeric runs; everything else (including non-ASCII bytes)
// separates words.
std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (u < 0x80 && std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

unsigned count_phrase(const std::vector<std::string>& words,
                      const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > words.size()) return 0;
  unsigned hits = 0;
  for (std::size_t i = 0; i + phrase.size() <= words.size(); ++i) {
    if (std::equal(phrase.begin(), phrase.end(), words.begin() + static_cast<long>(i))) ++hits;
  }
  return hits;
}

}  // namespace

Lexicon::Lexicon(std::vector<std::pair<ContextTask, std::string>> entries)
    : entries_(std::move(entries)) {}

Lexicon Lexicon::builtin() {
  return Lexicon({
      {ContextTask::C1, "grammar"},      {ContextTask::C1, "spelling"},
      {ContextTask::C1, "essay"},        {ContextTask::C1, "correct"},
      {ContextTask::C2, "relationship"}, {ContextTask::C2, "feel"},
      {ContextTask::C2, "unhappy"},      {ContextTask::C2, "advice"},
      {ContextTask::C2, "lonely"},       {ContextTask::C3, "brainstorm"},
      {ContextTask::C3, "ideas"},        {ContextTask::C3, "presentation"},
      {ContextTask::C3, "strategies"},   {ContextTask::C4, "explain"},
      {ContextTask::C4, "theory"},       {ContextTask::C4, "concept"},
      {ContextTask::C4, "learn"},        {ContextTask::C4, "understand"},
  });
}

Lexicon Lexicon::parse(std::string_view table) {
  std::vector<std::pair<ContextTask, std::string>> entries;
  std::size_t line_no = 0;
  std::istringstream in{std::string(table)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tab = line.find('\t');
    auto bad = [&](const std::string& why) {
      return Error(ErrorKind::ConfigError,
                   "lexicon line " + std::to_string(line_no) + ": " + why,
                   {{"line", line_no}});
    };
    if (tab == std::string::npos) throw bad("expected <context-id><TAB><keyword>");
    auto context = parse_context(trim(std::string_view(line).substr(0, tab)));
    if (!context) throw bad("unknown context id");
    const auto keyword = trim(std::string_view(line).substr(tab + 1));
    if (tokenize(keyword).empty()) throw bad("empty keyword");
    entries.emplace_back(*context, std::string(keyword));
  }
  return Lexicon(std::move(entries));
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read lexicon " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string_view to_string(ClassificationMethod m) {
  return m == ClassificationMethod::Lexicon ? "lexicon" : "delegated";
}

ContextTask pick_context(const std::array<unsigned, 4>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return kAllContexts[best];
}

ClassificationResult classify(std::string_view prompt, const Lexicon& lexicon) {
  if (trim(prompt).empty()) throw Error(ErrorKind::EmptyPrompt, "prompt is empty");
  const auto words = tokenize(prompt);

  // A keyword listed twice for the same context counts once.
  std::array<std::set<std::vector<std::string>>, 4> phrases;
  for (const auto& [context, keyword] : lexicon.entries()) {
    auto phrase = tokenize(keyword);
    if (!phrase.empty()) phrases[index_of(context)].insert(std::move(phrase));
  }

  ClassificationResult result{};
  for (std::size_t c = 0; c < 4; ++c) {
    for (const auto& phrase : phrases[c]) result.scores[c] += count_phrase(words, phrase);
  }
  if (std::all_of(result.scores.begin(), result.scores.end(), [](unsigned s) { return s == 0; })) {
    throw Error(ErrorKind::NoSignal, "no lexicon keyword matched the prompt");
  }
  result.context = pick_context(result.scores);
  result.method = ClassificationMethod::Lexicon;
  return result;
}

std::string_view delegated_classification_instruction() {
  return "Classify the user's message into exactly one task context and reply with only its "
         "identifier.\n"
         "C1: Correcting grammar\n"
         "C2: Emotional support\n"
         "C3: Brainstorming\n"
         "C4: Learning a concept\n"
         "Reply with C1, C2, C3 or C4 and nothing else.";
}

DelegationError::DelegationError(const Error& cause, std::optional<ClassificationResult> fallback)
    : Error(cause.kind(), cause.message(), cause.details()), fallback_(std::move(fallback)) {}

ClassificationResult classify_delegated(std::string_view prompt, GatewayBinding& binding,
                                        const Lexicon& fallback_lexicon) {
  if (trim(prompt).empty()) throw Error(ErrorKind::EmptyPrompt, "prompt is empty");

  std::optional<ClassificationResult> fallback;
  std::optional<Error> fallback_error;
  try {
    fallback = classify(prompt, fallback_lexicon);
  } catch (const Error& e) {
    fallback_error = e;
  }

  PromptBundle bundle;
  bundle.instruction = std::string(delegated_classification_instruction());
  bundle.history.push_back(Turn{Role::User, std::string(prompt), Phase::Active, 0});
  bundle.metadata.script_id = "classify";

  std::string reply;
  try {
    reply = binding.complete(bundle);
  } catch (const Error& e) {
    throw DelegationError(e, fallback);
  }

  // Accept the reply only if it names exactly one distinct context.
  std::set<std::size_t> named;
  for (std::size_t i = 0; i + 1 < reply.size(); ++i) {
    const bool boundary_before = i == 0 || !std::isalnum(static_cast<unsigned char>(reply[i - 1]));
    const bool boundary_after =
        i + 2 >= reply.size() || !std::isalnum(static_cast<unsigned char>(reply[i + 2]));
    if (reply[i] == 'C' && reply[i + 1] >= '1' && reply[i + 1] <= '4' && boundary_before &&
        boundary_after) {
      named.insert(static_cast<std::size_t>(reply[i + 1] - '1'));
    }
  }
  if (named.size() == 1) {
    ClassificationResult result{};
    result.context = kAllContexts[*named.begin()];
    result.scores[*named.begin()] = 1;
    result.method = ClassificationMethod::Delegated;
    return result;
  }
  if (fallback) return *fallback;
  throw *fallback_error;
}

}  // namespace recode
