#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "recode/codes.hpp"
#include "recode/transcript.hpp"

namespace recode {

/// The default error flag sentence.
inline constexpr std::string_view kErrorSentence = "I don't think that is right. Please try again.";
inline constexpr std::string_view kGreenLight = "Green Light";
inline constexpr std::string_view kRedLight = "Red Light";
inline constexpr std::string_view kReflectionPrompt =
    "Tasks 1 and 2 are complete. Please identify what recovery code you used and why.";

/// The reference task prompt for a context.
std::string_view task_prompt(ContextTask context);

/// Training instructions followed by the framework document they refer to.
std::string training_prompt();

/// Ordered USER turns for one scripted session. Turns may hold the
/// placeholders {{training}}, {{task}}, {{error}} and {{reflection}}.
struct Script {
  std::vector<std::string> user_turns;

  /// Placeholders expanded for `context`.
  std::vector<std::string> resolve(ContextTask context) const;
};

/// A: task, error. B: training, Green Light, task, error, Red Light, reflection.
Script builtin_script(Condition condition);

/// Turns separated by lines consisting of `---`. Leading and trailing blank
/// lines of each turn are dropped. Throws ConfigError on an empty script or
/// an empty turn.
Script parse_script(std::string_view text);
Script load_script(const std::filesystem::path& path);

}  // namespace recode
