#pragma once

#include <string_view>

// Fixed prompt texts used by the built-in scripts and the judge.
namespace recode::text {

extern const std::string_view kTrainingPrompt;
extern const std::string_view kTaskPromptC1;
extern const std::string_view kTaskPromptC2;
extern const std::string_view kTaskPromptC3;
extern const std::string_view kTaskPromptC4;
// Both contain the placeholder "[INSERT TRANSCRIPT CODE]".
extern const std::string_view kEvaluatorPromptA;
extern const std::string_view kEvaluatorPromptB;
extern const std::string_view kTraitSheet;

}  // namespace recode::text
