#include <gtest/gtest.h>

#include <random>

#include "recode/engine.hpp"
#include "support.hpp"

using namespace recode;
using testing_support::mock_gateway;

namespace {

const std::vector<Phase> kLegalB = {Phase::Training,  Phase::AwaitActivation, Phase::Active,
                                    Phase::ErrorFlagged, Phase::Recovered, Phase::Terminated,
                                    Phase::Reflection, Phase::Closed};
const std::vector<Phase> kLegalA = {Phase::Active, Phase::ErrorFlagged, Phase::Recovered, Phase::Closed};

std::shared_ptr<GatewayBinding> empty_agent() { return fresh_agent(mock_gateway(FixturePack{})); }

EngineConfig with_context(ContextTask c) {
  EngineConfig cfg;
  cfg.context = c;
  return cfg;
}

// True iff `seq` (consecutive duplicates removed) is a subsequence of `legal`.
bool follows_order(const std::vector<Phase>& seq, const std::vector<Phase>& legal) {
  std::size_t pos = 0;
  std::optional<Phase> last;
  for (auto p : seq) {
    if (last && *last == p) continue;
    last = p;
    while (pos < legal.size() && legal[pos] != p) ++pos;
    if (pos == legal.size()) return false;
    ++pos;
  }
  return true;
}

struct Played {
  Transcript transcript;
  std::vector<Phase> trajectory;
};

Played play(Condition condition, ContextTask context) {
  Session s(condition, with_context(context), fresh_agent(mock_gateway()));
  Played out;
  out.trajectory.push_back(s.phase());
  for (const auto& turn : builtin_script(condition).resolve(context)) {
    s.submit_user_message(turn);
    out.trajectory.push_back(s.phase());
    s.complete_pending();
    out.trajectory.push_back(s.phase());
  }
  if (s.phase() != Phase::Closed) s.close();
  out.trajectory.push_back(s.phase());
  out.transcript = finalize_transcript(s);
  return out;
}

std::vector<std::string> user_texts(const Transcript& t) {
  std::vector<std::string> out;
  for (const auto& turn : t.turns) {
    if (turn.role == Role::User) out.push_back(turn.text);
  }
  return out;
}

}  // namespace

TEST(Engine, NewSessionB) {
  Session s(Condition::B, EngineConfig{}, empty_agent());
  EXPECT_EQ(s.phase(), Phase::Training);
  ASSERT_TRUE(s.queued_user_turn());
  EXPECT_EQ(s.queued_user_turn()->rfind("You are being tasked with learning a recovery code", 0), 0u);
}

TEST(Engine, NewSessionA) {
  Session s(Condition::A, EngineConfig{}, empty_agent());
  EXPECT_EQ(s.phase(), Phase::Active);
  EXPECT_TRUE(s.turns().empty());
  EXPECT_FALSE(s.queued_user_turn());
}

TEST(Engine, SessionsShareNoState) {
  Session a(Condition::B, EngineConfig{}, empty_agent());
  Session b(Condition::B, EngineConfig{}, empty_agent());
  EXPECT_NE(a.id(), b.id());
  EXPECT_NE(a.binding().id(), b.binding().id());
  a.submit_user_message(*a.queued_user_turn());
  EXPECT_TRUE(b.turns().empty());
  EXPECT_TRUE(b.queued_user_turn());
}

TEST(Engine, BindingCannotBeReused) {
  auto agent = empty_agent();
  Session first(Condition::A, EngineConfig{}, agent);
  EXPECT_ERROR_KIND(Session(Condition::A, EngineConfig{}, agent), ConfigError);
  EXPECT_ERROR_KIND(Session(Condition::A, EngineConfig{}, nullptr), ConfigError);
}

TEST(Engine, ErrorFlagInBAttachesDirective) {
  Session s(Condition::B, with_context(ContextTask::C2), empty_agent());
  s.submit_user_message(*s.queued_user_turn());
  s.record_agent_reply("understood");
  EXPECT_EQ(s.submit_user_message("Green Light").phase, Phase::Active);
  s.record_agent_reply("ready");
  s.submit_user_message("my partner and I keep arguing");
  s.record_agent_reply("that sounds hard");

  const auto action = s.submit_user_message(kErrorSentence);
  EXPECT_EQ(action.kind, EngineAction::Kind::Transition);
  EXPECT_EQ(action.phase, Phase::ErrorFlagged);
  ASSERT_TRUE(action.bundle && action.bundle->instruction);
  EXPECT_EQ(*action.bundle->instruction, build_recovery_directive(lookup_code(ContextTask::C2)));
  ASSERT_TRUE(s.applied_code());
  EXPECT_EQ(s.applied_code()->canonical(), "{C2; A; T2; R2}");
  // the directive travels out of band, never as a turn
  for (const auto& t : s.turns()) EXPECT_EQ(t.text.find("Recover using"), std::string::npos);
}

TEST(Engine, GreenLightActivates) {
  Session s(Condition::B, EngineConfig{}, empty_agent());
  s.submit_user_message(*s.queued_user_turn());
  s.record_agent_reply("ok");
  EXPECT_EQ(s.phase(), Phase::AwaitActivation);
  const auto action = s.submit_user_message("  Green light. ");
  EXPECT_EQ(action.kind, EngineAction::Kind::Transition);
  EXPECT_EQ(action.phase, Phase::Active);
}

TEST(Engine, ControlTokens) {
  EXPECT_EQ(parse_control_token("Green Light"), ControlToken::GreenLight);
  EXPECT_EQ(parse_control_token("Red light"), ControlToken::RedLight);
  EXPECT_EQ(parse_control_token("Red LIGHT!"), ControlToken::RedLight);
  EXPECT_EQ(parse_control_token("green light"), ControlToken::None);
  EXPECT_EQ(parse_control_token("Green Light please"), ControlToken::None);
  EXPECT_EQ(parse_control_token("Greenlight"), ControlToken::None);
}

TEST(Engine, ControlTokenInAIsViolation) {
  Session s(Condition::A, EngineConfig{}, empty_agent());
  EXPECT_ERROR_KIND(s.submit_user_message("Green Light"), ProtocolViolation);
  EXPECT_ERROR_KIND(s.submit_user_message("Red Light"), ProtocolViolation);
  EXPECT_TRUE(s.turns().empty());
}

TEST(Engine, TaskBeforeActivationIsViolation) {
  Session s(Condition::B, EngineConfig{}, empty_agent());
  s.submit_user_message(*s.queued_user_turn());
  s.record_agent_reply("ok");
  EXPECT_ERROR_KIND(s.submit_user_message(task_prompt(ContextTask::C1)), ProtocolViolation);
}

TEST(Engine, EmptyMessage) {
  Session s(Condition::A, EngineConfig{}, empty_agent());
  EXPECT_ERROR_KIND(s.submit_user_message("   "), EmptyMessage);
}

TEST(Engine, RejectWhileReplyPending) {
  Session s(Condition::A, EngineConfig{}, empty_agent());
  s.submit_user_message(task_prompt(ContextTask::C3));
  const auto action = s.submit_user_message("hello?");
  EXPECT_EQ(action.kind, EngineAction::Kind::Reject);
  EXPECT_EQ(s.turns().size(), 1u);
}

TEST(Engine, ReflectionParsesCode) {
  Session s(Condition::B, with_context(ContextTask::C3), empty_agent());
  for (const char* msg : {"train", "Green Light", "brainstorm please", "I don't think that is right. Please try again.",
                          "Red Light"}) {
    s.submit_user_message(std::string(msg) == "train" ? *s.queued_user_turn() : msg);
    s.record_agent_reply("reply");
  }
  EXPECT_EQ(s.phase(), Phase::Terminated);
  EXPECT_EQ(s.submit_user_message(kReflectionPrompt).phase, Phase::Reflection);
  s.record_agent_reply("I used {C3; O; T3; R3} for brainstorming.");
  EXPECT_EQ(s.phase(), Phase::Closed);
  ASSERT_TRUE(s.reflection_code());
  EXPECT_EQ(*s.reflection_code(), lookup_code(ContextTask::C3));
}

TEST(Engine, MissingReflectionCodeIsNull) {
  Session s(Condition::B, with_context(ContextTask::C1), empty_agent());
  for (const char* msg : {"train", "Green Light", "fix my essay", "I don't think that is right. Please try again.",
                          "Red Light", "Tasks 1 and 2 are complete."}) {
    s.submit_user_message(std::string(msg) == "train" ? *s.queued_user_turn() : msg);
    s.record_agent_reply("no code named");
  }
  EXPECT_EQ(s.phase(), Phase::Closed);
  EXPECT_FALSE(s.reflection_code());
  EXPECT_NO_THROW(finalize_transcript(s));
}

TEST(Engine, DetectErrorFlag) {
  const std::vector<std::string> defaults{std::string(kErrorSentence)};
  EXPECT_TRUE(detect_error_flag("I don't think that is right. Please try again.", defaults));
  EXPECT_TRUE(detect_error_flag("i DON\xE2\x80\x99T think that is right. please try again.", defaults));
  EXPECT_FALSE(detect_error_flag("Thanks, that's perfect!", defaults));
  EXPECT_FALSE(detect_error_flag("that's wrong, redo it", defaults));
  auto extended = defaults;
  extended.push_back("that's wrong");
  EXPECT_TRUE(detect_error_flag("that's wrong, redo it", extended));
  EXPECT_EQ(EngineConfig{}.error_patterns, defaults);
}

TEST(Engine, DirectiveContent) {
  const auto c2 = build_recovery_directive(lookup_code(ContextTask::C2));
  EXPECT_NE(c2.find("warm"), std::string::npos);
  EXPECT_NE(c2.find("kind"), std::string::npos);
  for (auto step : lookup_code(ContextTask::C2).recovery().steps) EXPECT_NE(c2.find(step), std::string::npos);

  const auto c1 = build_recovery_directive(lookup_code(ContextTask::C1));
  EXPECT_NE(c1.find("Polite"), std::string::npos);
  EXPECT_NE(c1.find("Continue with perseverance"), std::string::npos);

  for (const auto& code : all_codes()) {
    const auto d = build_recovery_directive(code);
    int numbered = 0;
    std::istringstream in(d);
    for (std::string line; std::getline(in, line);) {
      if (line.size() > 2 && std::isdigit(static_cast<unsigned char>(line[0])) && line[1] == '.') ++numbered;
    }
    EXPECT_EQ(numbered, 3);
    for (const auto& other : all_codes()) {
      if (other == code) continue;
      EXPECT_EQ(d.find(other.canonical()), std::string::npos);
      EXPECT_EQ(d.find(other.tone().name), std::string::npos);
    }
  }
}

TEST(Engine, FinalizeGuards) {
  Session early(Condition::B, with_context(ContextTask::C1), empty_agent());
  early.submit_user_message(*early.queued_user_turn());
  early.record_agent_reply("ok");
  EXPECT_ERROR_KIND(finalize_transcript(early), IncompleteSession);
  early.close();
  EXPECT_ERROR_KIND(finalize_transcript(early), IncompleteSession);

  Session no_error(Condition::A, with_context(ContextTask::C1), empty_agent());
  no_error.submit_user_message("fix my essay");
  no_error.record_agent_reply("done");
  no_error.close();
  EXPECT_ERROR_KIND(finalize_transcript(no_error), IncompleteSession);

  EngineConfig casual = with_context(ContextTask::C1);
  casual.experiment_run = false;
  Session relaxed(Condition::A, casual, empty_agent());
  relaxed.submit_user_message("fix my essay");
  relaxed.record_agent_reply("done");
  relaxed.close();
  const auto t = finalize_transcript(relaxed);
  EXPECT_EQ(t.code, "CA:C1");
  EXPECT_FALSE(t.applied_code);
}

TEST(Engine, ContextClassifiedFromFirstTaskPrompt) {
  Session s(Condition::A, EngineConfig{}, empty_agent());
  EXPECT_FALSE(s.context());
  s.submit_user_message("hi there");
  s.record_agent_reply("hello");
  EXPECT_FALSE(s.context());
  s.submit_user_message(task_prompt(ContextTask::C4));
  s.record_agent_reply("sure");
  ASSERT_TRUE(s.context());
  EXPECT_EQ(*s.context(), ContextTask::C4);
  s.submit_user_message("now correct my grammar in this essay");
  s.record_agent_reply("ok");
  EXPECT_EQ(*s.context(), ContextTask::C4);
}

TEST(Engine, ErrorBeforeContextIsViolation) {
  Session s(Condition::A, EngineConfig{}, empty_agent());
  EXPECT_ERROR_KIND(s.submit_user_message(kErrorSentence), ProtocolViolation);
}

TEST(Engine, FirstAgentReplyFromFixture) {
  Session s(Condition::B, with_context(ContextTask::C1), fresh_agent(mock_gateway()));
  const auto reply = recode::exchange(s, *s.queued_user_turn());
  EXPECT_EQ(reply.rfind("I've read and understood", 0), 0u);
}

TEST(EngineProtocol, ConditionBScriptedRuns) {
  for (auto c : kAllContexts) {
    const auto played = play(Condition::B, c);
    const auto& t = played.transcript;
    EXPECT_EQ(t.code, make_transcript_code(Condition::B, c));
    EXPECT_EQ(user_texts(t), builtin_script(Condition::B).resolve(c));
    ASSERT_EQ(user_texts(t).size(), 6u);
    EXPECT_EQ(user_texts(t)[1], "Green Light");
    EXPECT_EQ(user_texts(t)[3], kErrorSentence);
    EXPECT_EQ(user_texts(t)[4], "Red Light");
    EXPECT_EQ(user_texts(t)[5], kReflectionPrompt);

    std::vector<Phase> distinct;
    for (auto p : played.trajectory) {
      if (distinct.empty() || distinct.back() != p) distinct.push_back(p);
    }
    EXPECT_EQ(distinct, kLegalB) << t.code;
    ASSERT_TRUE(t.reflection_code) << t.code;
    EXPECT_EQ(*t.reflection_code, lookup_code(c));
    ASSERT_TRUE(t.applied_code);
    EXPECT_EQ(*t.applied_code, lookup_code(c));
  }
}

TEST(EngineProtocol, ConditionAScriptedRuns) {
  for (auto c : kAllContexts) {
    const auto played = play(Condition::A, c);
    const auto& t = played.transcript;
    EXPECT_EQ(t.code, make_transcript_code(Condition::A, c));
    EXPECT_FALSE(t.applied_code);
    EXPECT_FALSE(t.reflection_code);
    for (const auto& turn : t.turns) {
      if (turn.role == Role::User) EXPECT_EQ(parse_control_token(turn.text), ControlToken::None);
      EXPECT_TRUE(turn.phase == Phase::Active || turn.phase == Phase::ErrorFlagged);
    }
    std::vector<Phase> distinct;
    for (auto p : played.trajectory) {
      if (distinct.empty() || distinct.back() != p) distinct.push_back(p);
    }
    EXPECT_EQ(distinct, kLegalA) << t.code;
  }
}

TEST(EngineProtocol, RunScriptMatchesManualPlay) {
  for (auto cond : {Condition::A, Condition::B}) {
    for (auto c : kAllContexts) {
      EXPECT_EQ(run_script(cond, c, mock_gateway()), play(cond, c).transcript);
    }
  }
}

// Random message streams: the phase trajectory never leaves the legal order,
// failed calls leave the phase untouched, roles alternate, the context is
// set at most once, and recovery directives appear only in B after a flag
// and always name the session's own code.
TEST(EngineProperty, PhaseOrderAndDirectiveFuzz) {
  std::mt19937 rng(424242);
  const std::vector<std::string> pool = {
      "Green Light", "Red Light", "Red light.", "green light", std::string(kErrorSentence),
      "that is not right", std::string(kReflectionPrompt), std::string(task_prompt(ContextTask::C1)),
      std::string(task_prompt(ContextTask::C3)), "brainstorm some ideas", "hello", "", "   ",
      "I DON'T THINK THAT IS RIGHT. please try again."};

  for (int run = 0; run < 400; ++run) {
    const auto condition = rng() % 2 ? Condition::B : Condition::A;
    Session s(condition, EngineConfig{}, empty_agent());
    std::vector<Phase> trajectory{s.phase()};
    std::optional<ContextTask> first_context;
    std::set<std::string> directives;
    bool flagged = false;

    for (int step = 0; step < 25; ++step) {
      const auto before = s.phase();
      const auto roll = rng() % 10;
      try {
        if (roll == 0) {
          s.close();
        } else if (roll < 4 && s.awaiting_reply()) {
          s.record_agent_reply("agent says something {C2; A; T2; R2}");
        } else {
          std::string msg = s.queued_user_turn() && rng() % 2 ? *s.queued_user_turn() : pool[rng() % pool.size()];
          const auto action = s.submit_user_message(msg);
          if (action.bundle && action.bundle->instruction) {
            EXPECT_EQ(condition, Condition::B);
            EXPECT_TRUE(action.reason.find("error flagged") == 0);
            ASSERT_TRUE(s.context());
            EXPECT_EQ(*action.bundle->instruction, build_recovery_directive(lookup_code(*s.context())));
            directives.insert(*action.bundle->instruction);
            flagged = true;
          }
        }
      } catch (const Error& e) {
        EXPECT_TRUE(e.kind() == ErrorKind::ProtocolViolation || e.kind() == ErrorKind::EmptyMessage)
            << to_string(e.kind());
        EXPECT_EQ(s.phase(), before);
      }
      trajectory.push_back(s.phase());
      if (s.context()) {
        if (!first_context) first_context = s.context();
        EXPECT_EQ(*first_context, *s.context());
      }
    }

    EXPECT_TRUE(follows_order(trajectory, condition == Condition::B ? kLegalB : kLegalA));
    EXPECT_LE(directives.size(), 1u);
    if (condition == Condition::A) EXPECT_FALSE(s.applied_code());
    if (s.applied_code()) EXPECT_TRUE(flagged);
    for (std::size_t i = 0; i < s.turns().size(); ++i) {
      EXPECT_EQ(s.turns()[i].index, i);
      EXPECT_EQ(s.turns()[i].role, i % 2 == 0 ? Role::User : Role::Agent);
    }
    if (condition == Condition::A) {
      for (const auto& t : s.turns()) {
        EXPECT_TRUE(t.phase == Phase::Active || t.phase == Phase::ErrorFlagged || t.phase == Phase::Recovered);
      }
    }
  }
}
