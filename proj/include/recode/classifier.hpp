#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "recode/codes.hpp"
#include "recode/error.hpp"

namespace recode {

class GatewayBinding;

/// Keyword table mapping words (or short phrases) to context tasks.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::vector<std::pair<ContextTask, std::string>> entries);

  /// Vocabulary drawn from the four reference task prompts.
  static Lexicon builtin();
  /// One `<context-id>\t<keyword>` per line; blank lines and `#` comments
  /// are skipped. Throws ConfigError with the line number on bad input.
  static Lexicon parse(std::string_view table);
  static Lexicon load(const std::filesystem::path& path);

  const std::vector<std::pair<ContextTask, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<ContextTask, std::string>> entries_;
};

enum class ClassificationMethod { Lexicon, Delegated };

std::string_view to_string(ClassificationMethod m);

struct ClassificationResult {
  ContextTask context;
  std::array<unsigned, 4> scores{};  // whole-word hits per context
  ClassificationMethod method = ClassificationMethod::Lexicon;
};

/// Case-insensitive whole-word keyword counting. Ties go to the lowest
/// context index. Throws EmptyPrompt or NoSignal.
ClassificationResult classify(std::string_view prompt, const Lexicon& lexicon);

/// Highest score, lowest index on ties.
ContextTask pick_context(const std::array<unsigned, 4>& scores);

/// Instruction sent to a delegated classifier.
std::string_view delegated_classification_instruction();

/// Thrown by classify_delegated when the gateway fails; carries the lexicon
/// result that callers may fall back to.
class DelegationError : public Error {
 public:
  DelegationError(const Error& cause, std::optional<ClassificationResult> fallback);
  const std::optional<ClassificationResult>& fallback() const { return fallback_; }

 private:
  std::optional<ClassificationResult> fallback_;
};

/// Asks the model for a single context token; falls back to the lexicon if
/// the reply does not contain exactly one of C1..C4.
ClassificationResult classify_delegated(std::string_view prompt, GatewayBinding& binding,
                                        const Lexicon& fallback_lexicon = Lexicon::builtin());

}  // namespace recode
