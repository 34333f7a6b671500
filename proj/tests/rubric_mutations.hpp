#pragma once

// Judge-output fixtures and the mutated variants each parser error is
// checked against.

#include <cctype>
#include <regex>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "recode/evaluation.hpp"
#include "support.hpp"

namespace testing_support {

using recode::ErrorKind;
using recode::SubDimension;
using recode::kAllSubDimensions;
using recode::kSubDimensionCount;
using recode::label;

inline std::string judge_fixture(const std::string& code) {
  const auto pack = recode::FixturePack::load_tree(fixture_root());
  const auto* text = pack.find("judge/" + code, 1);
  if (!text) throw std::runtime_error("no judge fixture for " + code);
  return *text;
}

inline bool contains_nocase(std::string hay, std::string needle) {
  for (auto* s : {&hay, &needle}) {
    for (auto& ch : *s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return hay.find(needle) != std::string::npos;
}

inline std::string drop_line_containing(const std::string& text, std::string_view needle) {
  std::istringstream in(text);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (contains_nocase(line, std::string(needle))) continue;
    out += line + "\n";
  }
  return out;
}

inline std::string replace_score(const std::string& text, std::string_view row_label, int value) {
  std::istringstream in(text);
  std::string out;
  const std::regex score(R"(\d+\s*/\s*5\b)");
  for (std::string line; std::getline(in, line);) {
    if (contains_nocase(line, std::string(row_label))) {
      line = std::regex_replace(line, score, std::to_string(value) + "/5", std::regex_constants::format_first_only);
    }
    out += line + "\n";
  }
  return out;
}

inline std::string replace_total(const std::string& text, int value) {
  return std::regex_replace(text, std::regex(R"(\d+\s*/\s*45)"), std::to_string(value) + "/45");
}

struct Mutation {
  std::string base;
  std::string text;
  ErrorKind expected;
  std::string what;
};

inline std::vector<Mutation> mutated_fixtures() {
  std::vector<Mutation> out;
  const std::vector<std::string> codes = {"CA:C1", "CA:C2", "CA:C3", "CA:C4", "CB:C1", "CB:C2", "CB:C3", "CB:C4"};
  // one missing label per sub-dimension
  for (std::size_t i = 0; i < kSubDimensionCount; ++i) {
    const auto& code = codes[i % codes.size()];
    const auto lbl = std::string(label(kAllSubDimensions[i]));
    out.push_back({code, drop_line_containing(judge_fixture(code), lbl), ErrorKind::MissingSubdimension,
                   "missing " + lbl});
  }
  // scores outside 1..5
  const std::vector<std::tuple<std::string, SubDimension, int>> ranges = {
      {"CA:C1", SubDimension::IdentifyingTheError, 6}, {"CA:C3", SubDimension::ToneNaturalness, 0},
      {"CB:C2", SubDimension::ContextualRelevance, 7}, {"CB:C3", SubDimension::ProvidingExplanation, 9},
      {"CB:C4", SubDimension::ToneAppropriateness, 0}};
  for (const auto& [code, sub, value] : ranges) {
    out.push_back({code, replace_score(judge_fixture(code), std::string(label(sub)), value),
                   ErrorKind::OutOfRange, std::string(label(sub)) + " = " + std::to_string(value)});
  }
  // stated totals that disagree with the scores
  const std::vector<std::pair<std::string, int>> totals = {
      {"CA:C1", 24}, {"CA:C4", 45}, {"CB:C1", 36}, {"CB:C3", 9}, {"CB:C4", 13}};
  for (const auto& [code, value] : totals) {
    out.push_back({code, replace_total(judge_fixture(code), value), ErrorKind::TotalMismatch,
                   "total " + std::to_string(value)});
  }
  // no transcript code at all
  out.push_back({"CA:C2", std::regex_replace(judge_fixture("CA:C2"), std::regex(R"(C[AB]\s*:\s*C[1-4])"), "this transcript"),
                 ErrorKind::MissingCode, "no code"});
  return out;
}

}  // namespace testing_support
