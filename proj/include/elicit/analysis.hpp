#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "elicit/session.hpp"

namespace elicit {

/// NonForced answers against one reference, identity and symbolic questions excluded.
struct AggregateRow {
  Lottery reference;
  std::size_t cells = 0;
  double prefer_reference = 0;
  double prefer_comparison = 0;
  double indifferent = 0;
  double incomplete = 0;
};

/// Share of strict answers on dominance-related lotteries that point the
/// way theory predicts, given an Incomparable (or Indifferent) answer on p.
/// Absent when no qualifying strict answers exist.
struct ConsistencyCell {
  std::size_t consistent = 0;
  std::size_t total = 0;
  std::optional<double> rate() const {
    return total ? std::optional<double>(static_cast<double>(consistent) / total) : std::nullopt;
  }
};

struct DominanceConsistency {
  ConsistencyCell incomplete_dominating;  // dominating lotteries ranked above r
  ConsistencyCell incomplete_dominated;   // r ranked above dominated lotteries
  ConsistencyCell indifferent_dominating;
  ConsistencyCell indifferent_dominated;
};

struct DominanceReport {
  DominanceConsistency weak;    // dominance by at least as much in both states, more in one
  DominanceConsistency strict;  // more in both states
};

struct DistanceRow {
  Lottery reference;
  Relation kind;
  std::size_t n = 0;
  std::optional<double> mean;
};

/// Cycle counts over the 23 non-reference lotteries and both r1-vs-r2 reports.
struct TransitivityStats {
  Treatment treatment = Treatment::NonForced;
  std::size_t strict_violations = 0;
  std::size_t strict_opportunities = 0;  // Forced: every p; NonForced: p with both legs strict
  /// Cycles allowing indifferent legs (at least one strict); NonForced only.
  std::size_t weak_violations = 0;
  std::size_t weak_opportunities = 0;
  std::optional<double> strict_rate() const;
  std::optional<double> weak_rate() const;

  /// Forced only: among violating (subject, p) cells, the share whose NonForced
  /// answers include a non-strict leg. `p_legs` looks at p-vs-r answers only;
  /// `with_reference_leg` also counts the r1-vs-r2 answers.
  ConsistencyCell violations_nonstrict_p_legs;
  ConsistencyCell violations_nonstrict_with_reference_leg;
  ConsistencyCell transitive_nonstrict_p_legs;
  ConsistencyCell transitive_nonstrict_with_reference_leg;
};

struct ReversalRow {
  Lottery reference;
  Lottery comparison;
  std::size_t subjects = 0;
  double incompleteness_rate = 0;  // NonForced Incomparable
  double reversal_rate = 0;        // NonForced strict, Forced opposite
};

struct ReversalReport {
  std::vector<ReversalRow> rows;
  /// Pearson r across comparisons per reference; absent when a column is constant.
  std::array<std::optional<double>, 2> pearson;
  /// Forced answers agreeing with a strict NonForced answer.
  ConsistencyCell consistency;
};

struct BeliefCrosstab {
  std::size_t subjects = 0;
  double certain_complete = 0;
  double certain_incomplete = 0;
  double uncertain_complete = 0;
  double uncertain_incomplete = 0;
};

struct ResponseTimeRow {
  Treatment treatment;
  Relation kind;
  std::size_t n = 0;
  std::optional<double> mean_ms;
};

struct SymbolicRow {
  int index = 0;
  std::string label;
  std::size_t n = 0;
  std::array<double, 4> fractions{};  // indexed by Relation
};

struct EventRow {
  std::string event;
  std::size_t subjects = 0;
  double incomplete_ever = 0;
  double uncertain_belief = 0;
  std::optional<double> mean_belief_pct;
};

struct AnalysisReport {
  std::size_t subjects = 0;
  std::vector<AggregateRow> aggregate;
  std::vector<std::size_t> incompleteness_histogram;  // index = Incomparable count, 0..50
  DominanceReport dominance;
  std::vector<DistanceRow> distance;
  std::array<TransitivityStats, 2> transitivity;  // NonForced, Forced
  ReversalReport reversal;
  BeliefCrosstab beliefs;
  std::vector<ResponseTimeRow> response_times;
  std::vector<SymbolicRow> symbolic;
  std::vector<EventRow> events;
  std::optional<double> info_expanded_fraction;
};

std::vector<AggregateRow> aggregate_choices(const std::vector<Session>& sessions);
std::vector<std::size_t> incompleteness_histogram(const std::vector<Session>& sessions);
DominanceReport dominance_consistency(const std::vector<Session>& sessions);
std::vector<DistanceRow> distance_stats(const std::vector<Session>& sessions);
TransitivityStats transitivity_violations(const std::vector<Session>& sessions, Treatment t);
ReversalReport reversal_analysis(const std::vector<Session>& sessions);
BeliefCrosstab belief_crosstab(const std::vector<Session>& sessions);
std::vector<ResponseTimeRow> response_time_means(const std::vector<Session>& sessions);
std::vector<SymbolicRow> symbolic_table(const std::vector<Session>& sessions);

/// Pearson correlation; nullopt for fewer than two points or a constant column.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Every statistic at once. Throws Error(InvalidArgument) on an empty input.
AnalysisReport analyze(const std::vector<Session>& sessions);

/// Rebuilds every `*.jsonl` session log in `dir`, in file-name order.
/// Throws Error(NotFound) when the directory holds no logs.
std::vector<Session> load_sessions(const std::filesystem::path& dir);

}  // namespace elicit
