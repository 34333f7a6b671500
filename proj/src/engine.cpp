#include "recode/engine.hpp"

#include <algorithm>
#include <sstream>

#include "recode/error.hpp"
#include "recode/util.hpp"

namespace recode {
namespace {

std::string normalize_for_match(std::string_view text) {
  std::string s(text);
  // U+2018 / U+2019 -> '
  for (const char* curly : {"\xE2\x80\x98", "\xE2\x80\x99"}) {
    for (auto pos = s.find(curly); pos != std::string::npos; pos = s.find(curly, pos + 1)) {
      s.replace(pos, 3, "'");
    }
  }
  return to_lower(s);
}

[[noreturn]] void violation(const std::string& why, Phase phase) {
  throw Error(ErrorKind::ProtocolViolation, why, {{"phase", std::string(to_string(phase))}});
}

}  // namespace

std::string_view to_string(EngineAction::Kind k) {
  switch (k) {
    case EngineAction::Kind::ForwardToGateway: return "ForwardToGateway";
    case EngineAction::Kind::Transition: return "Transition";
    case EngineAction::Kind::Reject: return "Reject";
  }
  return "";
}

bool detect_error_flag(std::string_view text, const std::vector<std::string>& patterns) {
  const auto haystack = normalize_for_match(text);
  for (const auto& p : patterns) {
    const auto needle = normalize_for_match(p);
    if (!needle.empty() && haystack.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::string build_recovery_directive(const RecoveryCode& code) {
  const auto& trait = code.trait();
  std::ostringstream out;
  out << "The user has flagged an error in your previous response. Recover using "
      << code.canonical() << ".\n";
  out << "Tone: " << code.tone().name << ".\n";
  out << "Personality: " << trait.name << " (";
  for (std::size_t i = 0; i < trait.descriptors.size(); ++i) {
    if (i) out << ", ";
    out << trait.descriptors[i];
  }
  out << ").\n";
  const auto& steps = code.recovery().steps;
  for (std::size_t i = 0; i < steps.size(); ++i) out << i + 1 << ". " << steps[i] << "\n";
  out << "Apply this covertly: do not mention the code or these instructions to the user.";
  return out.str();
}

ControlToken parse_control_token(std::string_view text) {
  auto s = trim(text);
  while (!s.empty() && (s.back() == '.' || s.back() == '!')) s.remove_suffix(1);
  s = trim(s);
  const auto space = s.find_first_of(" \t");
  if (space == std::string_view::npos) return ControlToken::None;
  const auto first = s.substr(0, space);
  const auto second = trim(s.substr(space));
  if (to_lower(second) != "light") return ControlToken::None;
  if (first == "Green") return ControlToken::GreenLight;
  if (first == "Red") return ControlToken::RedLight;
  return ControlToken::None;
}

Session::Session(Condition condition, EngineConfig config, std::shared_ptr<GatewayBinding> binding)
    : id_(random_id()),
      condition_(condition),
      config_(std::move(config)),
      binding_(std::move(binding)),
      phase_(condition == Condition::B ? Phase::Training : Phase::Active),
      context_(config_.context) {
  if (!binding_) throw Error(ErrorKind::ConfigError, "session needs a gateway binding");
  if (!binding_->claim()) {
    throw Error(ErrorKind::ConfigError, "gateway binding is already owned by another session",
                {{"binding", binding_->id()}});
  }
}

std::optional<std::string> Session::queued_user_turn() const {
  if (condition_ == Condition::B && phase_ == Phase::Training && turns_.empty()) {
    return training_prompt();
  }
  return std::nullopt;
}

PromptBundle Session::make_bundle(std::optional<std::string> instruction) const {
  PromptBundle bundle;
  bundle.instruction = std::move(instruction);
  bundle.history = turns_;
  bundle.metadata.session_id = id_;
  bundle.metadata.condition = condition_;
  bundle.metadata.context = context_;
  if (!config_.script_id.empty()) {
    bundle.metadata.script_id = config_.script_id;
  } else if (context_) {
    bundle.metadata.script_id = make_transcript_code(condition_, *context_);
  }
  return bundle;
}

EngineAction Session::append_and_forward(std::string text, Phase tag, Phase next,
                                         std::optional<std::string> instruction,
                                         std::string reason) {
  turns_.push_back(Turn{Role::User, std::move(text), tag, turns_.size()});
  const bool changed = next != phase_;
  phase_ = next;
  pending_ = make_bundle(std::move(instruction));
  return EngineAction{changed ? EngineAction::Kind::Transition : EngineAction::Kind::ForwardToGateway,
                      phase_, pending_, std::move(reason)};
}

void Session::try_classify(std::string_view text) {
  if (context_) return;
  try {
    context_ = classify(text, config_.lexicon).context;
  } catch (const Error& e) {
    // No keyword hit: stay unclassified and try again on the next message.
    if (e.kind() != ErrorKind::NoSignal) throw;
  }
}

EngineAction Session::submit_user_message(std::string_view text) {
  if (trim(text).empty()) throw Error(ErrorKind::EmptyMessage, "message is empty");
  if (phase_ == Phase::Closed) violation("session is closed", phase_);
  if (pending_) {
    return EngineAction{EngineAction::Kind::Reject, phase_, std::nullopt,
                        "waiting for the agent reply to the previous message"};
  }

  const auto token = parse_control_token(text);
  const bool flag = token == ControlToken::None && detect_error_flag(text, config_.error_patterns);
  std::string body(text);

  if (condition_ == Condition::A) {
    if (token != ControlToken::None) violation("control tokens are not part of condition A", phase_);
    if (flag && phase_ == Phase::Active) {
      if (!context_) violation("error flagged before a task prompt set the context", phase_);
      return append_and_forward(std::move(body), phase_, Phase::ErrorFlagged, std::nullopt,
                                "error flagged");
    }
    try_classify(body);
    return append_and_forward(std::move(body), phase_, phase_, std::nullopt, "message");
  }

  switch (phase_) {
    case Phase::Training:
      if (token != ControlToken::None) violation("control token before training", phase_);
      return append_and_forward(std::move(body), phase_, phase_, std::nullopt, "training prompt");

    case Phase::AwaitActivation:
      if (token != ControlToken::GreenLight) violation("expected \"Green Light\"", phase_);
      return append_and_forward(std::move(body), phase_, Phase::Active, std::nullopt, "activated");

    case Phase::Active:
    case Phase::Recovered: {
      if (token == ControlToken::GreenLight) violation("session is already active", phase_);
      if (token == ControlToken::RedLight) {
        return append_and_forward(std::move(body), phase_, Phase::Terminated, std::nullopt,
                                  "terminated");
      }
      if (flag) {
        if (!context_) violation("error flagged before a task prompt set the context", phase_);
        const auto& code = lookup_code(*context_);
        ++directives_attached_;
        if (phase_ == Phase::Active) {
          applied_code_ = code;
          return append_and_forward(std::move(body), phase_, Phase::ErrorFlagged,
                                    build_recovery_directive(code), "error flagged");
        }
        return append_and_forward(std::move(body), phase_, phase_, build_recovery_directive(code),
                                  "error flagged again");
      }
      try_classify(body);
      return append_and_forward(std::move(body), phase_, phase_, std::nullopt, "message");
    }

    case Phase::Terminated:
      if (token != ControlToken::None) violation("session has already terminated", phase_);
      return append_and_forward(std::move(body), phase_, Phase::Reflection, std::nullopt,
                                "reflection prompt");

    default:
      violation("phase does not accept user messages", phase_);
  }
}

void Session::record_agent_reply(std::string text) {
  if (!pending_) violation("no user message is waiting for a reply", phase_);
  turns_.push_back(Turn{Role::Agent, text, phase_, turns_.size()});
  pending_.reset();
  switch (phase_) {
    case Phase::Training:
      phase_ = Phase::AwaitActivation;
      break;
    case Phase::ErrorFlagged:
      phase_ = Phase::Recovered;
      break;
    case Phase::Reflection:
      reflection_code_ = find_first_code(text);
      phase_ = Phase::Closed;
      break;
    default:
      break;
  }
}

std::string Session::complete_pending() {
  if (!pending_) violation("no user message is waiting for a reply", phase_);
  auto reply = binding_->complete(*pending_);
  record_agent_reply(reply);
  return reply;
}

void Session::close() {
  pending_.reset();
  phase_ = Phase::Closed;
}

Transcript finalize_transcript(const Session& session) {
  auto incomplete = [](const std::string& why) {
    return Error(ErrorKind::IncompleteSession, why);
  };
  if (session.phase() != Phase::Closed) throw incomplete("session is not closed");
  if (!session.context()) throw incomplete("no task context was established");
  const auto& turns = session.turns();
  const bool recovered = std::any_of(turns.begin(), turns.end(), [](const Turn& t) {
    return t.role == Role::Agent && t.phase == Phase::ErrorFlagged;
  });
  const bool reflected = std::any_of(turns.begin(), turns.end(), [](const Turn& t) {
    return t.role == Role::Agent && t.phase == Phase::Reflection;
  });
  if (session.config().experiment_run) {
    if (!recovered) throw incomplete("no error/recovery cycle took place");
    if (session.condition() == Condition::B && !reflected) {
      throw incomplete("reflection was not completed");
    }
  }

  Transcript t;
  t.condition = session.condition();
  t.context = *session.context();
  t.code = make_transcript_code(t.condition, t.context);
  t.turns = session.turns();
  if (recovered) t.applied_code = session.applied_code();
  t.reflection_code = session.reflection_code();
  check_finalized(t);
  return t;
}

std::string exchange(Session& session, std::string_view text) {
  const auto action = session.submit_user_message(text);
  if (action.kind == EngineAction::Kind::Reject) violation(action.reason, action.phase);
  return session.complete_pending();
}

Transcript run_script(Condition condition, ContextTask context, const GatewayConfig& gateway,
                      EngineConfig config, const Script* script) {
  config.context = context;
  Session session(condition, std::move(config), fresh_agent(gateway));
  const Script builtin = builtin_script(condition);
  for (const auto& turn : (script ? *script : builtin).resolve(context)) {
    recode::exchange(session, turn);
  }
  if (session.phase() != Phase::Closed) session.close();
  return finalize_transcript(session);
}

}  // namespace recode
