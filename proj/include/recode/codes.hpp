#pragma once

// The closed registry of recovery codes. Each context task owns exactly one
// code; trait, tone and recovery steps follow from the context and cannot be
// combined any other way.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace recode {

enum class ContextTask { C1, C2, C3, C4 };

inline constexpr std::array<ContextTask, 4> kAllContexts = {
    ContextTask::C1, ContextTask::C2, ContextTask::C3, ContextTask::C4};

/// 0-based position of the context (C1 -> 0).
constexpr std::size_t index_of(ContextTask c) { return static_cast<std::size_t>(c); }

/// "C1".."C4".
std::string_view context_id(ContextTask c);
std::string_view context_label(ContextTask c);
/// Case-sensitive inverse of context_id.
std::optional<ContextTask> parse_context(std::string_view id);

enum class Trait { Conscientiousness, Agreeableness, Openness, Extraversion };

struct TraitProfile {
  Trait id;
  char letter;
  std::string_view name;
  std::span<const std::string_view> descriptors;
};

struct ToneLabel {
  int index;  // 1..4
  std::string_view name;
};

struct RecoverySteps {
  int index;  // 1..4
  std::array<std::string_view, 3> steps;  // identify, reassure, continue
};

class RecoveryCode {
 public:
  ContextTask context() const { return context_; }
  std::string_view context_label() const;
  const TraitProfile& trait() const;
  const ToneLabel& tone() const;
  const RecoverySteps& recovery() const;
  /// "{C1; C; T1; R1}"
  std::string_view canonical() const;

  friend bool operator==(const RecoveryCode& a, const RecoveryCode& b) {
    return a.context_ == b.context_;
  }

 private:
  friend const RecoveryCode& lookup_code(ContextTask);
  explicit constexpr RecoveryCode(ContextTask c) : context_(c) {}

  ContextTask context_;
};

const RecoveryCode& lookup_code(ContextTask context);

/// All four registry entries in context order.
std::span<const RecoveryCode> all_codes();

/// Parses a code string. Whitespace anywhere is ignored; everything else is
/// case-sensitive. Throws MalformedCode for shape errors and InconsistentCode
/// for well-shaped tuples that are not a registry row.
const RecoveryCode& parse_code(std::string_view text);

std::string render_code(const RecoveryCode& code);

/// First substring of `text` that parses as a registry code, if any.
std::optional<RecoveryCode> find_first_code(std::string_view text);

/// The four traits in the order the evaluator information sheets list them.
std::span<const TraitProfile> trait_profiles();

/// Human-readable rendering of the whole framework table, used as the
/// "Recovery Code" attachment for agents and judges.
std::string render_framework_document();

}  // namespace recode
