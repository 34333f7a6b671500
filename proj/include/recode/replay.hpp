#pragma once

// Offline reproduction of the reference experiment: all eight scripted
// sessions against fixture agents, scored by fixture judges, aggregated and
// compared with the published figures.

#include <string>
#include <vector>

#include "recode/analytics.hpp"
#include "recode/gateway.hpp"
#include "recode/storage.hpp"

namespace recode {

struct ReplayCheck {
  std::string metric;  // e.g. "CB:C3.percent", "B.pct.overall", "A.mean.tone_naturalness"
  std::string expected;
  std::string actual;
  bool ok() const { return expected == actual; }
};

struct ReplayResult {
  std::vector<Transcript> transcripts;
  std::vector<ScoreRecord> scores;
  AggregateReport report;
  std::vector<ReplayCheck> checks;

  bool ok() const;
  std::size_t failures() const;
};

/// Published values keyed like ReplayCheck::metric.
const std::vector<std::pair<std::string, std::string>>& reference_values();

std::vector<ReplayCheck> compare_with_reference(const AggregateReport& report);

/// Runs A then B for C1..C4. When `store` is given, transcripts, scores and
/// the report are persisted as they are produced.
ReplayResult replay_paper(const GatewayConfig& gateway, Store* store = nullptr);

}  // namespace recode
