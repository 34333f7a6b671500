#include "recode/analytics.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "recode/error.hpp"

namespace recode {
namespace {

std::string fixed(std::int64_t scaled, int decimals) {
  std::int64_t unit = 1;
  for (int i = 0; i < decimals; ++i) unit *= 10;
  const bool negative = scaled < 0;
  const std::int64_t mag = negative ? -scaled : scaled;
  std::ostringstream out;
  if (negative) out << '-';
  out << mag / unit << '.' << std::setw(decimals) << std::setfill('0') << mag % unit;
  return out.str();
}

Fraction percent_of(std::int64_t sum, std::int64_t max) { return Fraction{sum * 100, max}; }

ConditionAggregate aggregate(const ConditionScoreSet& set) {
  return ConditionAggregate{subdimension_means(set), dimension_percentages(set)};
}

}  // namespace

std::int64_t round_half_away(std::int64_t num, std::int64_t den, std::int64_t scale) {
  const bool negative = num < 0;
  const std::int64_t mag = (negative ? -num : num) * scale;
  const std::int64_t q = (2 * mag + den) / (2 * den);
  return negative ? -q : q;
}

Tenths to_tenths(const Fraction& f) { return Tenths{round_half_away(f.num, f.den, 10)}; }
Hundredths to_hundredths(const Fraction& f) {
  return Hundredths{round_half_away(f.num, f.den, 100)};
}

std::string format(Tenths t) { return fixed(t.v, 1); }

std::string format_signed(Tenths t) { return (t.v > 0 ? "+" : "") + fixed(t.v, 1); }

std::string format(Hundredths h) {
  auto s = fixed(h.v, 2);
  if (s.back() == '0') s.pop_back();
  return s;
}

ConditionScoreSet ConditionScoreSet::make(Condition condition,
                                          const std::vector<RubricScore>& scores) {
  ConditionScoreSet set;
  set.condition = condition;
  for (const auto& score : scores) {
    const auto [code_condition, context] = parse_transcript_code(score.transcript_code);
    if (code_condition != condition) {
      throw Error(ErrorKind::IncompleteSet, score.transcript_code + " does not belong to condition " +
                                                std::string(to_string(condition)));
    }
    if (!set.scores.emplace(context, score).second) {
      throw Error(ErrorKind::IncompleteSet, "duplicate score for " + score.transcript_code);
    }
  }
  set.validate();
  return set;
}

void ConditionScoreSet::validate() const {
  std::vector<std::string> missing;
  for (auto c : kAllContexts) {
    auto it = scores.find(c);
    if (it == scores.end()) {
      missing.push_back(make_transcript_code(condition, c));
    } else if (it->second.transcript_code != make_transcript_code(condition, c)) {
      throw Error(ErrorKind::IncompleteSet,
                  "score filed under " + make_transcript_code(condition, c) + " is for " +
                      it->second.transcript_code);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::IncompleteSet, "missing scores for " + list, {{"missing", missing}});
  }
}

Fraction transcript_fraction(const RubricScore& score) {
  return percent_of(score.raw_total, kMaxTotal);
}

Tenths transcript_percent(const RubricScore& score) {
  return to_tenths(transcript_fraction(score));
}

std::array<Fraction, kSubDimensionCount> subdimension_mean_fractions(const ConditionScoreSet& set) {
  set.validate();
  std::array<Fraction, kSubDimensionCount> out{};
  for (auto s : kAllSubDimensions) {
    std::int64_t sum = 0;
    for (const auto& [context, score] : set.scores) sum += score[s];
    out[index_of(s)] = Fraction{sum, static_cast<std::int64_t>(set.scores.size())};
  }
  return out;
}

std::array<Hundredths, kSubDimensionCount> subdimension_means(const ConditionScoreSet& set) {
  std::array<Hundredths, kSubDimensionCount> out{};
  const auto exact = subdimension_mean_fractions(set);
  for (std::size_t i = 0; i < exact.size(); ++i) out[i] = to_hundredths(exact[i]);
  return out;
}

DimensionPercentages dimension_percentages(const ConditionScoreSet& set) {
  set.validate();
  const auto n = static_cast<std::int64_t>(set.scores.size());
  DimensionPercentages out;
  for (auto d : kAllDimensions) {
    std::int64_t sum = 0;
    for (const auto& [context, score] : set.scores) sum += score.dimension_total(d);
    const auto max = kMaxLikert * static_cast<std::int64_t>(subdimensions_of(d).size()) * n;
    out.exact[index_of(d)] = percent_of(sum, max);
    out.dimension[index_of(d)] = to_tenths(out.exact[index_of(d)]);
  }
  std::int64_t total = 0;
  for (const auto& [context, score] : set.scores) total += score.raw_total;
  out.overall_exact = percent_of(total, kMaxTotal * n);
  out.overall = to_tenths(out.overall_exact);
  return out;
}

ConditionDifferences condition_differences(const DimensionPercentages& a,
                                           const DimensionPercentages& b) {
  ConditionDifferences out;
  for (std::size_t i = 0; i < out.dimension.size(); ++i) {
    out.dimension[i] = Tenths{b.dimension[i].v - a.dimension[i].v};
  }
  out.overall = Tenths{b.overall.v - a.overall.v};
  return out;
}

AggregateReport build_report(const std::vector<RubricScore>& scores) {
  AggregateReport report;
  std::vector<RubricScore> sorted = scores;
  std::sort(sorted.begin(), sorted.end(), [](const RubricScore& x, const RubricScore& y) {
    return x.transcript_code < y.transcript_code;
  });
  std::set<std::string> seen;
  std::vector<RubricScore> by_condition[2];
  for (const auto& score : sorted) {
    if (!seen.insert(score.transcript_code).second) {
      throw Error(ErrorKind::IncompleteSet, "duplicate score for " + score.transcript_code);
    }
    const auto [condition, context] = parse_transcript_code(score.transcript_code);
    (void)context;
    report.per_transcript.push_back(
        TranscriptRow{score.transcript_code, score.raw_total, transcript_percent(score)});
    by_condition[condition == Condition::A ? 0 : 1].push_back(score);
  }
  if (by_condition[0].size() == kAllContexts.size()) {
    report.a = aggregate(ConditionScoreSet::make(Condition::A, by_condition[0]));
  }
  if (by_condition[1].size() == kAllContexts.size()) {
    report.b = aggregate(ConditionScoreSet::make(Condition::B, by_condition[1]));
  }
  if (report.a && report.b) {
    report.diffs = condition_differences(report.a->percentages, report.b->percentages);
  }
  return report;
}

std::string overall_line(const AggregateReport& report) {
  if (!report.a || !report.b || !report.diffs) return {};
  return "overall: A " + format(report.a->percentages.overall) + " B " +
         format(report.b->percentages.overall) + " diff " +
         format_signed(report.diffs->overall) + "pp";
}

std::string render_report(const AggregateReport& report) {
  std::ostringstream out;
  auto cell = [&](std::string_view text, int width) {
    out << std::left << std::setw(width) << text;
  };
  auto or_dash = [](const std::optional<ConditionAggregate>& agg, auto get) {
    return agg ? get(*agg) : std::string("-");
  };

  out << "Transcript totals\n";
  cell("transcript", 12);
  cell("raw /45", 10);
  out << "percent\n";
  for (const auto& row : report.per_transcript) {
    cell(row.code, 12);
    cell(std::to_string(row.raw_total), 10);
    out << format(row.percent) << "\n";
  }

  out << "\nDimension percentages\n";
  cell("dimension", 20);
  cell("A", 8);
  cell("B", 8);
  out << "diff\n";
  for (auto d : kAllDimensions) {
    const auto i = index_of(d);
    cell(label(d), 20);
    cell(or_dash(report.a, [&](const ConditionAggregate& g) { return format(g.percentages.dimension[i]); }), 8);
    cell(or_dash(report.b, [&](const ConditionAggregate& g) { return format(g.percentages.dimension[i]); }), 8);
    out << (report.diffs ? format_signed(report.diffs->dimension[i]) + "pp" : "-") << "\n";
  }
  cell("Overall", 20);
  cell(or_dash(report.a, [](const ConditionAggregate& g) { return format(g.percentages.overall); }), 8);
  cell(or_dash(report.b, [](const ConditionAggregate& g) { return format(g.percentages.overall); }), 8);
  out << (report.diffs ? format_signed(report.diffs->overall) + "pp" : "-") << "\n";

  out << "\nSub-dimension means (out of 5)\n";
  cell("sub-dimension", 30);
  cell("A", 8);
  out << "B\n";
  for (auto s : kAllSubDimensions) {
    const auto i = index_of(s);
    cell(label(s), 30);
    cell(or_dash(report.a, [&](const ConditionAggregate& g) { return format(g.means[i]); }), 8);
    out << or_dash(report.b, [&](const ConditionAggregate& g) { return format(g.means[i]); })
        << "\n";
  }

  const auto summary = overall_line(report);
  if (!summary.empty()) out << "\n" << summary << "\n";
  return out.str();
}

std::string report_to_csv(const AggregateReport& report) {
  std::ostringstream out;
  out << "condition,metric,value\n";
  for (const auto& row : report.per_transcript) {
    const auto condition = row.code.substr(1, 1);
    out << condition << ',' << row.code << ".raw_total," << row.raw_total << '\n';
    out << condition << ',' << row.code << ".percent," << format(row.percent) << '\n';
  }
  auto emit = [&](std::string_view condition, const ConditionAggregate& g) {
    for (auto s : kAllSubDimensions) {
      out << condition << ",mean." << key(s) << ',' << format(g.means[index_of(s)]) << '\n';
    }
    for (auto d : kAllDimensions) {
      out << condition << ",pct." << key(d) << ',' << format(g.percentages.dimension[index_of(d)])
          << '\n';
    }
    out << condition << ",pct.overall," << format(g.percentages.overall) << '\n';
  };
  if (report.a) emit("A", *report.a);
  if (report.b) emit("B", *report.b);
  if (report.diffs) {
    for (auto d : kAllDimensions) {
      out << "diff,pp." << key(d) << ',' << format_signed(report.diffs->dimension[index_of(d)])
          << '\n';
    }
    out << "diff,pp.overall," << format_signed(report.diffs->overall) << '\n';
  }
  return out.str();
}

}  // namespace recode
