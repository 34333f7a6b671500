#pragma once

// Condition A / B protocol state machine.
//
// A session owns one gateway binding. Each accepted USER turn yields a prompt
// bundle; the caller completes it (directly or via complete_pending) and
// records the AGENT reply before the next USER turn is accepted.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recode/classifier.hpp"
#include "recode/codes.hpp"
#include "recode/gateway.hpp"
#include "recode/scripts.hpp"
#include "recode/transcript.hpp"

namespace recode {

struct EngineConfig {
  /// Case-insensitive substrings that mark a USER turn as an error flag.
  std::vector<std::string> error_patterns{std::string(kErrorSentence)};
  /// Skip classification and use this context.
  std::optional<ContextTask> context;
  Lexicon lexicon = Lexicon::builtin();
  /// Experiment runs must complete a full error/recovery cycle to finalize.
  bool experiment_run = true;
  /// Fixture key for mock replies; empty means the transcript code.
  std::string script_id;
};

struct EngineAction {
  enum class Kind { ForwardToGateway, Transition, Reject };
  Kind kind;
  Phase phase;                        // phase after the message was processed
  std::optional<PromptBundle> bundle;  // absent only for Reject
  std::string reason;
};

std::string_view to_string(EngineAction::Kind k);

/// True iff any pattern occurs in `text`, ignoring case. Typographic
/// apostrophes are treated as ASCII ones.
bool detect_error_flag(std::string_view text, const std::vector<std::string>& patterns);

/// Instruction-channel text for the recovery turn: tone, trait descriptors,
/// the three numbered steps, and a note to keep the code covert.
std::string build_recovery_directive(const RecoveryCode& code);

enum class ControlToken { None, GreenLight, RedLight };

/// "Green Light" / "Red Light" after trimming; trailing "." or "!" and the
/// case of "light" are ignored.
ControlToken parse_control_token(std::string_view text);

class Session {
 public:
  /// Throws ConfigError if `binding` is null or already owned by a session.
  Session(Condition condition, EngineConfig config, std::shared_ptr<GatewayBinding> binding);

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const { return id_; }
  Condition condition() const { return condition_; }
  Phase phase() const { return phase_; }
  const std::optional<ContextTask>& context() const { return context_; }
  const std::vector<Turn>& turns() const { return turns_; }
  const std::optional<RecoveryCode>& applied_code() const { return applied_code_; }
  const std::optional<RecoveryCode>& reflection_code() const { return reflection_code_; }
  const EngineConfig& config() const { return config_; }
  GatewayBinding& binding() { return *binding_; }

  /// The training prompt while a B session waits for its first turn.
  std::optional<std::string> queued_user_turn() const;

  bool awaiting_reply() const { return pending_.has_value(); }
  const std::optional<PromptBundle>& pending() const { return pending_; }

  /// Throws EmptyMessage or ProtocolViolation. Returns Reject without
  /// appending while a reply is outstanding.
  EngineAction submit_user_message(std::string_view text);

  /// Appends the AGENT reply to the outstanding bundle.
  void record_agent_reply(std::string text);

  /// Sends the outstanding bundle through the binding and records the reply.
  std::string complete_pending();

  /// Ends the session. Later messages are protocol violations.
  void close();

  /// The directive bundles carried so far (at most one distinct text).
  std::size_t directives_attached() const { return directives_attached_; }

 private:
  PromptBundle make_bundle(std::optional<std::string> instruction) const;
  EngineAction append_and_forward(std::string text, Phase tag, Phase next,
                                  std::optional<std::string> instruction, std::string reason);
  void try_classify(std::string_view text);

  std::string id_;
  Condition condition_;
  EngineConfig config_;
  std::shared_ptr<GatewayBinding> binding_;
  Phase phase_;
  std::optional<ContextTask> context_;
  std::vector<Turn> turns_;
  std::optional<RecoveryCode> applied_code_;
  std::optional<RecoveryCode> reflection_code_;
  std::optional<PromptBundle> pending_;
  std::size_t directives_attached_ = 0;
};

/// Snapshot of a closed session. Throws IncompleteSession if the session is
/// not closed, has no context, or (for experiment runs) skipped the error /
/// recovery cycle or, in B, the reflection.
Transcript finalize_transcript(const Session& session);

/// submit + complete + record. Throws ProtocolViolation on Reject.
std::string exchange(Session& session, std::string_view text);

/// Plays `script` (the built-in one if null) on a fresh binding and returns
/// the finalized transcript.
Transcript run_script(Condition condition, ContextTask context, const GatewayConfig& gateway,
                      EngineConfig config = {}, const Script* script = nullptr);

}  // namespace recode
