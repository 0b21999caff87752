#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "elicit/agents.hpp"
#include "elicit/error.hpp"
#include "elicit/json_io.hpp"
#include "elicit/mle.hpp"
#include "elicit/payment.hpp"
#include "elicit/protocol.hpp"
#include "elicit/set_construction.hpp"
#include "oracles.hpp"

using namespace elicit;

namespace {

Session complete_session(SessionConfig cfg, const std::function<Relation(const Question&)>& fn,
                         BeliefReport belief = {50, true, std::nullopt}) {
  Session s("pay", std::move(cfg));
  std::int64_t t = 0;
  while (const Question* q = s.in_flight()) s.record_response(q->id, fn(*q), t += 100);
  s.record_belief(belief);
  s.finalize();
  return s;
}

std::vector<Observation> protocol_observations(const std::function<Relation(const Lottery&, const Lottery&)>& fn) {
  std::vector<Observation> obs;
  for (const Lottery& r : protocol::kReferences)
    for (const Lottery& p : protocol::lotteries())
      if (!(p == r)) obs.push_back({p, r, fn(p, r)});
  return obs;
}

}  // namespace

TEST(InitSets, SizesAndDeterminism) {
  Rng a(5), b(5), c(6);
  const auto sa = init_sets(lottery(9, 11), a);
  const auto sb = init_sets(lottery(9, 11), b);
  const auto sc = init_sets(lottery(9, 11), c);
  EXPECT_EQ(sa.better.size(), 10u);
  EXPECT_EQ(sa.worse.size(), 10u);
  EXPECT_EQ(sa, sb);
  // Matching all 20 draws on a 2001 x 2001 grid has probability 2001^-40.
  EXPECT_FALSE(sa == sc);
  for (const auto& l : sa.better) EXPECT_TRUE(in_lottery_space(l));
  for (const auto& l : sa.worse) EXPECT_TRUE(in_lottery_space(l));
}

TEST(ApplyResponse, PreferredComparisonShiftsUp) {
  // From (5, 19) only i = 1 keeps v within 20.
  EXPECT_EQ(feasible_steps(lottery(5, 19), +1), std::vector<int>{1});
  Rng rng(1);
  auto st = init_sets(lottery(9, 11), rng);
  apply_response(st, lottery(5, 19), Relation::FirstPreferred, rng);
  ASSERT_EQ(st.replacement_log.size(), 1u);
  EXPECT_EQ(st.replacement_log[0].inserted, lottery(6, 20));
  EXPECT_EQ(st.better[st.replacement_log[0].slot], lottery(6, 20));
}

TEST(ApplyResponse, SecondPreferredShiftsDownIntoWorse) {
  Rng rng(2);
  auto st = init_sets(lottery(14, 2), rng);
  apply_response(st, lottery(9, 9), Relation::SecondPreferred, rng);
  ASSERT_EQ(st.replacement_log.size(), 1u);
  const auto& r = st.replacement_log[0];
  EXPECT_EQ(r.target, Replacement::Target::Worse);
  EXPECT_EQ(r.inserted, lottery(9 - r.step, 9 - r.step));
}

TEST(ApplyResponse, IncomparableChangesNothing) {
  Rng rng(3);
  auto st = init_sets(lottery(9, 11), rng);
  const auto before = st;
  Rng copy = rng;
  apply_response(st, lottery(9, 9), Relation::Incomparable, rng);
  EXPECT_EQ(st, before);
  EXPECT_EQ(rng.next(), copy.next());
}

TEST(ApplyResponse, IndifferentReplacesOneOfEach) {
  Rng rng(4);
  auto st = init_sets(lottery(9, 11), rng);
  apply_response(st, lottery(9, 9), Relation::Indifferent, rng);
  ASSERT_EQ(st.replacement_log.size(), 2u);
  EXPECT_NE(st.replacement_log[0].target, st.replacement_log[1].target);
  EXPECT_EQ(st.better.size(), 10u);
  EXPECT_EQ(st.worse.size(), 10u);
}

TEST(FeasibleSteps, AvoidProtocolLotteriesAndStayInRange) {
  for (const Lottery& p : protocol::lotteries()) {
    for (int sign : {+1, -1}) {
      for (int i : feasible_steps(p, sign)) {
        const Lottery shifted{p.nv + Money::dollars(sign * i), p.v + Money::dollars(sign * i)};
        EXPECT_TRUE(in_lottery_space(shifted));
        EXPECT_FALSE(protocol::is_protocol_lottery(shifted));
      }
    }
  }
  // (8, 13) + 1 lands on the protocol lottery (9, 14).
  ASSERT_TRUE(protocol::is_protocol_lottery(lottery(9, 14)));
  const auto steps = feasible_steps(lottery(8, 13), +1);
  EXPECT_EQ(std::count(steps.begin(), steps.end(), 1), 0);
}

TEST(SettleSets, BranchesAndFrequencies) {
  Rng init(9);
  const auto st = init_sets(lottery(9, 11), init);
  int better = 0;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    Rng rng(seed);
    const auto s = settle_sets(st, rng);
    if (s.better_branch) {
      ++better;
      EXPECT_EQ(s.paid, st.better[s.slot]);
    } else {
      EXPECT_EQ(s.paid, st.reference);
    }
    Rng again(seed);
    EXPECT_EQ(settle_sets(st, again).paid, s.paid);
  }
  EXPECT_NEAR(better / 4000.0, 0.5, 0.03);
}

TEST(SetConstruction, BetterSetEntriesBeatTheirTriggerUnderTheTrueModel) {
  const auto model = PreferenceModel::seu(0.4, UtilityFunction::crra(0.3));
  SessionConfig cfg;
  cfg.rng_seed = 17;
  const Session s = complete_session(cfg, [&](const Question& q) {
    const Relation r = compare(q.comparison, q.reference, model);
    return q.treatment == Treatment::Forced && !is_strict(r) ? Relation::FirstPreferred : r;
  });
  const auto states = run_algorithms(s);
  std::size_t checked = 0;
  for (const auto& set : states.sets) {
    for (const auto& rep : set.replacement_log) {
      if (rep.target != Replacement::Target::Better) continue;
      EXPECT_EQ(compare(rep.inserted, rep.trigger, model), Relation::FirstPreferred);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0u);
}

TEST(SettleMle, Examples) {
  EXPECT_EQ(settle_mle(0.0, {0.5}), lottery(14, 2));
  // Log utility at an even prior, computed by hand.
  const double eu_142 = (std::log(14.0) + std::log(2.0)) / 2, eu_95 = (std::log(9.0) + std::log(5.0)) / 2;
  EXPECT_NEAR(eu_142, 1.666, 1e-3);
  EXPECT_NEAR(eu_95, 1.903, 1e-3);
  EXPECT_EQ(settle_mle(1.0, {0.5}), lottery(9, 5));
  EXPECT_EQ(settle_mle(0.0, {1.0}), lottery(9, 5));
  // 14 - 12 pi = 9 - 4 pi at pi = 5/8: the tie pays (14, 2).
  EXPECT_EQ(settle_mle(0.0, {0.625}), lottery(14, 2));
}

TEST(FitCrra, EmptyDataIsAnError) {
  try {
    fit_crra({}, {0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(FitCrra, IncomparableAnswersAreNotObservations) {
  MleState st;
  st.add({lottery(9, 9), lottery(9, 11), Relation::Incomparable});
  st.add({lottery(9, 9), lottery(9, 11), Relation::SecondPreferred});
  EXPECT_EQ(st.observations().size(), 1u);
}

TEST(FitCrra, RiskNeutralAgentRecoversLinearUtility) {
  const auto obs = protocol_observations([](const Lottery& p, const Lottery& r) {
    return compare(p, r, PreferenceModel::seu(0.5));
  });
  const MleFit fit = fit_crra(obs, {0.5});
  EXPECT_GE(fit.rho, -0.05);
  EXPECT_LE(fit.rho, 0.05);
  // 1-D oracle: the best rho on a fine grid, with sigma profiled on a grid.
  const auto grid = oracle::grid_mle(obs, 0.5, -1, 3, 801, 1e-3, 2, 400);
  EXPECT_GE(fit.log_likelihood, grid.ll - 1e-6);
  EXPECT_GE(grid.rho, -0.05);
  EXPECT_LE(grid.rho, 0.05);
}

TEST(FitCrra, BeatsTheGridOracleOnNoisyData) {
  for (int seed = 0; seed < 12; ++seed) {
    Rng rng(seed);
    const double rho = -0.5 + 1.7 * rng.uniform();
    const LogitAgent gen{0.5, UtilityFunction::crra(rho), 0.3, 0.1};
    const auto obs = protocol_observations([&](const Lottery& p, const Lottery& r) {
      Question q;
      q.reference = r;
      q.comparison = p;
      q.option_order = allowed_relations(Treatment::NonForced);
      return answer(gen, q, rng);
    });
    const MleFit fit = fit_crra(obs, {0.5});
    const auto grid = oracle::grid_mle(obs, 0.5, -1, 3, 200, 2.0 / 50, 2, 50);
    EXPECT_GE(fit.log_likelihood, grid.ll - 1e-6) << "seed " << seed;
    EXPECT_NEAR(fit.log_likelihood, oracle::log_likelihood(obs, fit.rho, fit.sigma, 0.5), 1e-9);
  }
}

TEST(FitCrra, InvariantToObservationOrder) {
  Rng rng(77);
  const LogitAgent gen{0.5, UtilityFunction::crra(0.4), 0.2, 0.0};
  auto obs = protocol_observations([&](const Lottery& p, const Lottery& r) {
    Question q;
    q.reference = r;
    q.comparison = p;
    q.option_order = allowed_relations(Treatment::NonForced);
    return answer(gen, q, rng);
  });
  const MleFit base = fit_crra(obs, {0.5});
  for (int k = 0; k < 5; ++k) {
    rng.shuffle(obs.begin(), obs.end());
    const MleFit again = fit_crra(obs, {0.5});
    EXPECT_EQ(again.rho, base.rho);
    EXPECT_EQ(again.sigma, base.sigma);
    EXPECT_EQ(settle_mle(again.rho, {0.5}), settle_mle(base.rho, {0.5}));
  }
}

TEST(FitCrra, AllIndifferentFixesSigma) {
  const auto obs = protocol_observations([](const Lottery&, const Lottery&) { return Relation::Indifferent; });
  const MleFit fit = fit_crra(obs, {0.5});
  EXPECT_TRUE(fit.sigma_fixed);
  EXPECT_EQ(fit.sigma, MleOptions{}.default_sigma);
}

TEST(Bdm, CertainVerbReportPaysThroughTheEvent) {
  const BeliefReport report{100, true, std::nullopt};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto p = settle_bdm(report, rng, EventState::Verb);
    EXPECT_EQ(p.audit_trail["bdm"]["branch"], "event");
    EXPECT_EQ(*p.paid_amount, Money::dollars(5));
  }
}

TEST(Bdm, ZeroReportPaysHalfTheTime) {
  // Sum over k = 1..100 of (1/101)(k/100) = 0.5; k = 0 falls to the event, which does not occur.
  const BeliefReport report{0, true, std::nullopt};
  int paid = 0;
  constexpr int kDraws = 20000;
  for (int n = 0; n < kDraws; ++n) {
    Rng rng(static_cast<std::uint64_t>(n) + 1000);
    const auto p = settle_bdm(report, rng, EventState::NotVerb);
    paid += *p.paid_amount == Money::dollars(5);
  }
  EXPECT_NEAR(static_cast<double>(paid) / kDraws, 0.5, 0.01);
}

TEST(Bdm, ReplayIsDeterministic) {
  const BeliefReport report{37, false, std::make_pair(20, 50)};
  Rng a(12), b(12);
  EXPECT_EQ(settle_bdm(report, a, EventState::Verb), settle_bdm(report, b, EventState::Verb));
}

TEST(SelectPaidDecision, DegenerateWeights) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SessionConfig cfg;
    cfg.rng_seed = seed;
    cfg.payment_weights = {1, 0, 0};
    const auto s = complete_session(cfg, [](const Question&) { return Relation::FirstPreferred; });
    EXPECT_EQ(settle_session(s, std::nullopt).source, PaymentSource::NonForcedAlgorithm);
  }
}

TEST(SelectPaidDecision, ForcedDirectPaysTheChosenLottery) {
  SessionConfig cfg;
  cfg.rng_seed = 31;
  cfg.payment_weights = {0, 1, 0};
  const auto s = complete_session(cfg, [](const Question&) { return Relation::FirstPreferred; });
  PaymentOutcome p = settle_session(s, std::nullopt);
  ASSERT_EQ(p.source, PaymentSource::ForcedDirect);
  EXPECT_TRUE(p.pending());
  const auto qid = p.audit_trail["forced"]["question_id"].get<std::uint32_t>();
  EXPECT_EQ(*p.paid_lottery, s.plan()[qid].comparison);
  resolve_payment(p, EventState::NotVerb);
  EXPECT_EQ(*p.paid_amount, p.paid_lottery->nv);
  EXPECT_NO_THROW(resolve_payment(p, EventState::NotVerb));
  EXPECT_THROW(resolve_payment(p, EventState::Verb), Error);
}

TEST(SelectPaidDecision, SetConstructionDelegatesToTheSets) {
  SessionConfig cfg;
  cfg.rng_seed = 5;
  cfg.payment_weights = {1, 0, 0};
  const auto s = complete_session(cfg, [](const Question& q) { return allowed_relations(q.treatment)[0]; });
  const auto p = settle_session(s, EventState::Verb);
  const auto& audit = p.audit_trail["set_construction"];
  if (audit["branch"] == "worse") {
    EXPECT_EQ(to_json(*p.paid_lottery), audit["reference"]);
  } else {
    EXPECT_EQ(to_json(*p.paid_lottery), audit["better_set"][audit["slot"].get<std::size_t>()]);
  }
  EXPECT_EQ(*p.paid_amount, p.paid_lottery->v);
}

TEST(SelectPaidDecision, MleWithoutRankingsFallsBackToRiskNeutral) {
  SessionConfig cfg;
  cfg.rng_seed = 6;
  cfg.algorithm = Algorithm::Mle;
  cfg.payment_weights = {1, 0, 0};
  const auto s = complete_session(cfg, [](const Question& q) {
    return q.treatment == Treatment::NonForced ? Relation::Incomparable : Relation::FirstPreferred;
  });
  const auto p = settle_session(s, std::nullopt);
  EXPECT_TRUE(p.audit_trail["mle"]["fit_failed"].get<bool>());
  EXPECT_EQ(*p.paid_lottery, lottery(14, 2));
}

TEST(PaymentJson, RoundTrip) {
  SessionConfig cfg;
  cfg.rng_seed = 8;
  const auto s = complete_session(cfg, [](const Question& q) { return allowed_relations(q.treatment)[1]; });
  const auto p = settle_session(s, EventState::NotVerb);
  EXPECT_EQ(payment_from_json(to_json(p)), p);
}
