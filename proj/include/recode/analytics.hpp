#pragma once

// Aggregates rubric scores into per-transcript percentages, per-condition
// sub-dimension means, dimension percentages and condition differences.
// Arithmetic is exact (integer sums, rational division); rounding happens
// once, half away from zero, when a value is quantized for display.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recode/evaluation.hpp"

namespace recode {

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  friend bool operator==(const Fraction& a, const Fraction& b) { return a.num * b.den == b.num * a.den; }
};

/// round(num * scale / den), half away from zero. den must be positive.
std::int64_t round_half_away(std::int64_t num, std::int64_t den, std::int64_t scale);

/// A value stored as an integer count of tenths, e.g. 556 for 55.6.
struct Tenths {
  std::int64_t v = 0;
  friend auto operator<=>(const Tenths&, const Tenths&) = default;
};
/// A value stored as an integer count of hundredths, e.g. 175 for 1.75.
struct Hundredths {
  std::int64_t v = 0;
  friend auto operator<=>(const Hundredths&, const Hundredths&) = default;
};

Tenths to_tenths(const Fraction& f);
Hundredths to_hundredths(const Fraction& f);

/// "55.6", "-3.0"
std::string format(Tenths t);
/// "+27.8", "-3.0", "0.0"
std::string format_signed(Tenths t);
/// At least one decimal, trailing zeros dropped: "1.5", "1.75", "1.0".
std::string format(Hundredths h);

/// Exactly the four context transcripts of one condition.
struct ConditionScoreSet {
  Condition condition = Condition::A;
  std::map<ContextTask, RubricScore> scores;

  /// Throws IncompleteSet unless `scores` holds each context of `condition`
  /// exactly once.
  static ConditionScoreSet make(Condition condition, const std::vector<RubricScore>& scores);
  void validate() const;
};

Fraction transcript_fraction(const RubricScore& score);  // percent, exact
Tenths transcript_percent(const RubricScore& score);

std::array<Fraction, kSubDimensionCount> subdimension_mean_fractions(const ConditionScoreSet& set);
std::array<Hundredths, kSubDimensionCount> subdimension_means(const ConditionScoreSet& set);

struct DimensionPercentages {
  std::array<Fraction, 3> exact{};  // percent per dimension, unrounded
  Fraction overall_exact;
  std::array<Tenths, 3> dimension{};
  Tenths overall;
};

/// Per dimension: sum / (5 x #subdims x #transcripts) x 100; overall: sum of
/// raw totals / (45 x #transcripts) x 100.
DimensionPercentages dimension_percentages(const ConditionScoreSet& set);

struct ConditionDifferences {
  std::array<Tenths, 3> dimension{};  // percentage points, B - A
  Tenths overall;
};

/// B - A on the rounded percentages.
ConditionDifferences condition_differences(const DimensionPercentages& a,
                                           const DimensionPercentages& b);

struct TranscriptRow {
  std::string code;
  int raw_total = 0;
  Tenths percent;
};

struct ConditionAggregate {
  std::array<Hundredths, kSubDimensionCount> means{};
  DimensionPercentages percentages;
};

struct AggregateReport {
  std::vector<TranscriptRow> per_transcript;  // A before B, C1..C4
  std::optional<ConditionAggregate> a;
  std::optional<ConditionAggregate> b;
  std::optional<ConditionDifferences> diffs;  // when both conditions are complete
};

/// Uses whatever is available: every score gets a transcript row, each
/// complete condition gets an aggregate. Throws IncompleteSet on duplicate
/// transcript codes.
AggregateReport build_report(const std::vector<RubricScore>& scores);

/// Plain-text tables; ends with "overall: A x B y diff +zpp" when both
/// conditions are complete.
std::string render_report(const AggregateReport& report);

/// condition,metric,value rows.
std::string report_to_csv(const AggregateReport& report);

/// "overall: A 48.9 B 76.7 diff +27.8pp"
std::string overall_line(const AggregateReport& report);

}  // namespace recode
