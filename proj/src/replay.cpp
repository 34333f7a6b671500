#include "recode/replay.hpp"

#include <algorithm>
#include <map>

#include "recode/engine.hpp"

namespace recode {

bool ReplayResult::ok() const { return failures() == 0; }

std::size_t ReplayResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const ReplayCheck& c) { return !c.ok(); }));
}

const std::vector<std::pair<std::string, std::string>>& reference_values() {
  static const std::vector<std::pair<std::string, std::string>> values = [] {
    std::vector<std::pair<std::string, std::string>> v;
    const std::vector<std::tuple<std::string, int, std::string>> totals = {
        {"CA:C1", 25, "55.6"}, {"CA:C2", 25, "55.6"}, {"CA:C3", 17, "37.8"},
        {"CA:C4", 21, "46.7"}, {"CB:C1", 35, "77.8"}, {"CB:C2", 34, "75.6"},
        {"CB:C3", 38, "84.4"}, {"CB:C4", 31, "68.9"}};
    for (const auto& [code, raw, pct] : totals) {
      v.emplace_back(code + ".raw_total", std::to_string(raw));
      v.emplace_back(code + ".percent", pct);
    }
    const std::vector<std::tuple<std::string, std::string, std::string, std::string>> dims = {
        {"recovery_quality", "38.8", "70.0", "+31.2"},
        {"tone_alignment", "65.0", "80.0", "+15.0"},
        {"appropriateness", "51.7", "83.3", "+31.6"},
        {"overall", "48.9", "76.7", "+27.8"}};
    for (const auto& [dim, a, b, diff] : dims) {
      v.emplace_back("A.pct." + dim, a);
      v.emplace_back("B.pct." + dim, b);
      v.emplace_back("diff.pp." + dim, diff);
    }
    const std::array<const char*, kSubDimensionCount> means_a = {
        "1.5", "1.75", "1.0", "3.5", "2.75", "3.75", "2.5", "2.5", "2.75"};
    const std::array<const char*, kSubDimensionCount> means_b = {
        "3.5", "3.5", "3.0", "4.0", "4.0", "4.0", "4.75", "3.75", "4.0"};
    for (auto s : kAllSubDimensions) {
      v.emplace_back("A.mean." + std::string(key(s)), means_a[index_of(s)]);
      v.emplace_back("B.mean." + std::string(key(s)), means_b[index_of(s)]);
    }
    return v;
  }();
  return values;
}

std::vector<ReplayCheck> compare_with_reference(const AggregateReport& report) {
  std::map<std::string, std::string> actual;
  for (const auto& row : report.per_transcript) {
    actual[row.code + ".raw_total"] = std::to_string(row.raw_total);
    actual[row.code + ".percent"] = format(row.percent);
  }
  auto add_condition = [&](const std::string& c, const std::optional<ConditionAggregate>& g) {
    if (!g) return;
    for (auto d : kAllDimensions) {
      actual[c + ".pct." + std::string(key(d))] = format(g->percentages.dimension[index_of(d)]);
    }
    actual[c + ".pct.overall"] = format(g->percentages.overall);
    for (auto s : kAllSubDimensions) {
      actual[c + ".mean." + std::string(key(s))] = format(g->means[index_of(s)]);
    }
  };
  add_condition("A", report.a);
  add_condition("B", report.b);
  if (report.diffs) {
    for (auto d : kAllDimensions) {
      actual["diff.pp." + std::string(key(d))] =
          format_signed(report.diffs->dimension[index_of(d)]);
    }
    actual["diff.pp.overall"] = format_signed(report.diffs->overall);
  }

  std::vector<ReplayCheck> checks;
  for (const auto& [metric, expected] : reference_values()) {
    auto it = actual.find(metric);
    checks.push_back({metric, expected, it == actual.end() ? "(missing)" : it->second});
  }
  return checks;
}

ReplayResult replay_paper(const GatewayConfig& gateway, Store* store) {
  ReplayResult result;
  std::vector<RubricScore> scores;
  for (auto condition : {Condition::A, Condition::B}) {
    for (auto context : kAllContexts) {
      auto transcript = run_script(condition, context, gateway);
      if (store) store->save_transcript(transcript, to_string(gateway.provider));
      auto record = evaluate_transcript(transcript, gateway);
      if (store) store->save_scores(record);
      scores.push_back(record.score);
      result.transcripts.push_back(std::move(transcript));
      result.scores.push_back(std::move(record));
    }
  }
  result.report = build_report(scores);
  result.checks = compare_with_reference(result.report);
  if (store) store->save_report(render_report(result.report), report_to_csv(result.report));
  return result;
}

}  // namespace recode
