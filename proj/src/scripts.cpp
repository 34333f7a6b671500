#include "recode/scripts.hpp"

#include <fstream>
#include <sstream>

#include "recode/error.hpp"
#include "recode/templates.hpp"

namespace recode {
namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string strip_blank_lines(const std::string& s) {
  auto begin = s.find_first_not_of("\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of("\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string_view task_prompt(ContextTask context) {
  switch (context) {
    case ContextTask::C1: return text::kTaskPromptC1;
    case ContextTask::C2: return text::kTaskPromptC2;
    case ContextTask::C3: return text::kTaskPromptC3;
    case ContextTask::C4: return text::kTaskPromptC4;
  }
  return {};
}

std::string training_prompt() {
  return std::string(text::kTrainingPrompt) + "\n\n" + render_framework_document();
}

std::vector<std::string> Script::resolve(ContextTask context) const {
  const std::string training = training_prompt();
  std::vector<std::string> out;
  out.reserve(user_turns.size());
  for (auto turn : user_turns) {
    replace_all(turn, "{{training}}", training);
    replace_all(turn, "{{task}}", task_prompt(context));
    replace_all(turn, "{{error}}", kErrorSentence);
    replace_all(turn, "{{reflection}}", kReflectionPrompt);
    out.push_back(std::move(turn));
  }
  return out;
}

Script builtin_script(Condition condition) {
  if (condition == Condition::A) return Script{{"{{task}}", "{{error}}"}};
  return Script{{"{{training}}", std::string(kGreenLight), "{{task}}", "{{error}}",
                 std::string(kRedLight), "{{reflection}}"}};
}

Script parse_script(std::string_view text) {
  Script script;
  std::istringstream in{std::string(text)};
  std::string current;
  auto flush = [&] {
    auto turn = strip_blank_lines(current);
    if (turn.empty()) {
      throw Error(ErrorKind::ConfigError,
                  "script turn " + std::to_string(script.user_turns.size() + 1) + " is empty");
    }
    script.user_turns.push_back(std::move(turn));
    current.clear();
  };
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "---") {
      flush();
    } else {
      current += line;
      current += '\n';
    }
  }
  if (!strip_blank_lines(current).empty() || !script.user_turns.empty()) flush();
  if (script.user_turns.empty()) throw Error(ErrorKind::ConfigError, "script has no turns");
  return script;
}

Script load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read script " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_script(buf.str());
}

}  // namespace recode
