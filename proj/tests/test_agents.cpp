#include <gtest/gtest.h>

#include "elicit/agents.hpp"
#include "elicit/error.hpp"
#include "elicit/population.hpp"
#include "elicit/protocol.hpp"

using namespace elicit;

namespace {

Question question(Lottery comparison, Lottery reference, Treatment t) {
  Question q;
  q.reference = reference;
  q.comparison = comparison;
  q.treatment = t;
  q.option_order = allowed_relations(t);
  return q;
}

PreferenceModel bewley(double lo, double hi) { return {BeliefSet(lo, hi), UtilitySet::singleton(UtilityFunction::linear())}; }

}  // namespace

TEST(Answer, DeterministicBewleyIsIncomparable) {
  const AgentSpec a = DeterministicAgent{bewley(0.2, 0.4), CompletionRule::UniformRandom};
  Rng rng(1);
  EXPECT_EQ(answer(a, question(lottery(5, 19), lottery(9, 11), Treatment::NonForced), rng), Relation::Incomparable);
}

TEST(Answer, DeterministicSeuIdentityIsIndifferent) {
  const AgentSpec a = DeterministicAgent{PreferenceModel::seu(0.3), CompletionRule::UniformRandom};
  Rng rng(2);
  for (const Lottery& r : protocol::kReferences)
    EXPECT_EQ(answer(a, question(r, r, Treatment::NonForced), rng), Relation::Indifferent);
}

TEST(Answer, DeterministicAgentsRepeatThemselves) {
  const AgentSpec a = DeterministicAgent{{BeliefSet(0.2, 0.5), UtilitySet(CrraInterval{0, 0.6})}, CompletionRule::MaxMinEU};
  for (const Lottery& p : protocol::lotteries()) {
    for (Treatment t : {Treatment::NonForced, Treatment::Forced}) {
      Rng r1(3), r2(4);
      EXPECT_EQ(answer(a, question(p, lottery(14, 2), t), r1), answer(a, question(p, lottery(14, 2), t), r2));
    }
  }
}

TEST(Answer, ForcedCompletionRules) {
  const auto model = bewley(0.2, 0.4);
  const Question q = question(lottery(5, 19), lottery(9, 11), Treatment::Forced);
  // Ambiguity-averse choice: min EU of (5, 19) is 7.8 against 9.4 for (9, 11).
  Rng rng(5);
  EXPECT_EQ(answer(DeterministicAgent{model, CompletionRule::MaxMinEU}, q, rng), Relation::SecondPreferred);
  Question shown = q;
  shown.option_order = {Relation::SecondPreferred, Relation::FirstPreferred};
  EXPECT_EQ(answer(DeterministicAgent{model, CompletionRule::FirstOption}, shown, rng), Relation::SecondPreferred);
  int first = 0;
  for (int n = 0; n < 2000; ++n) first += answer(DeterministicAgent{model, CompletionRule::UniformRandom}, q, rng) == Relation::FirstPreferred;
  EXPECT_NEAR(first / 2000.0, 0.5, 0.04);
}

TEST(Answer, LogitConvergesToEuMaximisation) {
  const AgentSpec a = LogitAgent{0.5, UtilityFunction::linear(), 1e-6, 0.0};
  Rng rng(6);
  int agree = 0, total = 0;
  for (int n = 0; n < 1000; ++n) {
    const Lottery& p = protocol::lotteries()[static_cast<std::size_t>(n) % 25];
    const Lottery& r = protocol::kReferences[static_cast<std::size_t>(n) % 2];
    const Relation truth = compare(p, r, PreferenceModel::seu(0.5));
    if (!is_strict(truth)) continue;
    ++total;
    agree += answer(a, question(p, r, Treatment::NonForced), rng) == truth;
  }
  EXPECT_GE(static_cast<double>(agree) / total, 0.99);
}

TEST(Answer, LogitNeverIncomparableAndUsesTheBand) {
  const AgentSpec a = LogitAgent{0.5, UtilityFunction::linear(), 0.5, 0.25};
  Rng rng(7);
  for (int n = 0; n < 500; ++n) {
    for (const Lottery& p : protocol::lotteries()) {
      const Relation got = answer(a, question(p, lottery(9, 11), Treatment::NonForced), rng);
      EXPECT_NE(got, Relation::Incomparable);
      const double d = expected_utility(p, {0.5}, UtilityFunction::linear()) - 10.0;
      EXPECT_EQ(got == Relation::Indifferent, std::abs(d) < 0.25);
      EXPECT_TRUE(is_strict(answer(a, question(p, lottery(9, 11), Treatment::Forced), rng)));
    }
  }
}

TEST(Answer, TremblesAreUniformOverAllowedOptions) {
  const AgentSpec inner = DeterministicAgent{PreferenceModel::seu(0.5), CompletionRule::UniformRandom};
  const AgentSpec always = trembling(inner, 1.0);
  const AgentSpec never = trembling(inner, 0.0);
  Rng rng(8);
  std::array<int, 4> counts{};
  const Question q = question(lottery(9, 9), lottery(9, 11), Treatment::NonForced);
  for (int n = 0; n < 8000; ++n) ++counts[static_cast<std::size_t>(answer(always, q, rng))];
  for (int c : counts) EXPECT_NEAR(c / 8000.0, 0.25, 0.02);
  for (int n = 0; n < 100; ++n) EXPECT_EQ(answer(never, q, rng), Relation::SecondPreferred);
  const Question f = question(lottery(9, 9), lottery(9, 11), Treatment::Forced);
  for (int n = 0; n < 200; ++n) EXPECT_TRUE(is_strict(answer(always, f, rng)));
}

TEST(ReportBelief, Examples) {
  const auto certain = report_belief(DeterministicAgent{PreferenceModel::seu(0.5), CompletionRule::UniformRandom});
  EXPECT_EQ(certain.point_pct, 50);
  EXPECT_TRUE(certain.certain);
  const auto range = report_belief(DeterministicAgent{bewley(0.4, 0.8), CompletionRule::UniformRandom});
  EXPECT_EQ(range.point_pct, 60);
  EXPECT_FALSE(range.certain);
  EXPECT_EQ(range.range_pct, std::make_pair(40, 80));
  const auto degenerate = report_belief(DeterministicAgent{bewley(0.3, 0.3), CompletionRule::UniformRandom});
  EXPECT_TRUE(degenerate.certain);
  EXPECT_EQ(degenerate.point_pct, 30);
  EXPECT_TRUE(report_belief(LogitAgent{0.37}).certain);
}

TEST(ResponseTime, ConstantPlusNoise) {
  Rng rng(9);
  for (int n = 0; n < 1000; ++n) {
    const auto strict = simulated_response_time(Relation::FirstPreferred, rng);
    const auto unsure = simulated_response_time(Relation::Incomparable, rng);
    EXPECT_GE(strict, 8000);
    EXPECT_LT(strict, 12000);
    EXPECT_GE(unsure, 9500);
    EXPECT_LT(unsure, 13500);
  }
}

TEST(Population, JsonRoundTripAndStrictness) {
  const nlohmann::json j = {
      {"seed", 3},
      {"groups",
       {{{"name", "b"}, {"kind", "deterministic"}, {"count", 4}, {"belief_center", {0.2, 0.4}}, {"belief_half_width", 0.1}},
        {{"name", "s"}, {"kind", "logit"}, {"count", 2}, {"sigma", 0.3}, {"epsilon", 0.1}}}}};
  const auto cfg = population_from_json(j);
  EXPECT_EQ(cfg.total_agents(), 6);
  EXPECT_EQ(to_json(population_from_json(to_json(cfg))), to_json(cfg));
  auto bad = j;
  bad["groups"][0]["colour"] = "red";
  EXPECT_THROW(population_from_json(bad), Error);
  auto neg = j;
  neg["groups"][1]["epsilon"] = 1.5;
  EXPECT_THROW(population_from_json(neg), Error);
}

TEST(Population, AgentCountRescalingKeepsProportions) {
  auto cfg = population_from_json({{"groups",
                                    {{{"name", "a"}, {"kind", "deterministic"}, {"count", 100}},
                                     {{"name", "b"}, {"kind", "logit"}, {"count", 100}}}}});
  const auto scaled = with_agent_count(cfg, 51);
  EXPECT_EQ(scaled.total_agents(), 51);
  EXPECT_EQ(scaled.groups[0].count + scaled.groups[1].count, 51);
  EXPECT_LE(std::abs(scaled.groups[0].count - scaled.groups[1].count), 1);
}

TEST(Population, InstantiationIsDeterministicAndInRange) {
  auto cfg = population_from_json({{"seed", 11},
                                   {"groups",
                                    {{{"name", "a"}, {"kind", "deterministic"}, {"count", 50},
                                      {"belief_center", {0.3, 0.5}}, {"belief_half_width", {0.05, 0.1}}}}}});
  for (int i = 0; i < 50; ++i) {
    const auto a = instantiate_agent(cfg, i);
    const auto b = instantiate_agent(cfg, i);
    const auto ma = agent_model(a.spec), mb = agent_model(b.spec);
    EXPECT_EQ(ma.beliefs.lo(), mb.beliefs.lo());
    EXPECT_EQ(ma.beliefs.hi(), mb.beliefs.hi());
    EXPECT_GE(ma.beliefs.midpoint(), 0.3 - 1e-12);
    EXPECT_LE(ma.beliefs.midpoint(), 0.5 + 1e-12);
    EXPECT_GE(ma.beliefs.hi() - ma.beliefs.lo(), 0.1 - 1e-12);
  }
}
