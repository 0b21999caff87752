#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "elicit/error.hpp"
#include "elicit/json_io.hpp"
#include "elicit/plan.hpp"
#include "elicit/protocol.hpp"
#include "elicit/session.hpp"

using namespace elicit;

namespace {

SessionConfig config(std::uint64_t seed, bool symbolic = false) {
  SessionConfig cfg;
  cfg.rng_seed = seed;
  cfg.include_symbolic_block = symbolic;
  return cfg;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(BuildPlan, DefaultShape) {
  const auto plan = build_plan(config(1));
  ASSERT_EQ(plan.size(), 100u);
  const auto forced = std::count_if(plan.begin(), plan.end(), [](const Question& q) { return q.treatment == Treatment::Forced; });
  EXPECT_EQ(forced, 50);
  for (std::size_t i = 0; i < plan.size(); ++i) EXPECT_EQ(plan[i].id, i);
}

TEST(BuildPlan, SameSeedSamePlan) {
  const auto a = build_plan(config(42, true)), b = build_plan(config(42, true));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(to_json(a[i]), to_json(b[i]));
  const auto c = build_plan(config(43, true));
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= to_json(a[i]) != to_json(c[i]);
  EXPECT_TRUE(differs);
}

TEST(BuildPlan, BlocksHoldTheLotteryTableForEverySeed) {
  std::vector<Lottery> table(protocol::lotteries().begin(), protocol::lotteries().end());
  std::sort(table.begin(), table.end());
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto plan = build_plan(config(seed));
    std::map<std::pair<int, int>, std::vector<Lottery>> blocks;
    std::map<std::pair<int, int>, Lottery> block_reference;
    for (const Question& q : plan) {
      const std::pair<int, int> key{static_cast<int>(q.treatment), q.block_index};
      blocks[key].push_back(q.comparison);
      if (block_reference.count(key)) {
        EXPECT_EQ(block_reference[key], q.reference);
      }
      block_reference[key] = q.reference;
    }
    ASSERT_EQ(blocks.size(), 4u);
    for (auto& [key, lots] : blocks) {
      std::sort(lots.begin(), lots.end());
      EXPECT_EQ(lots, table);
    }
    for (Treatment t : {Treatment::NonForced, Treatment::Forced}) {
      for (const Lottery& r : protocol::kReferences) {
        const auto identity = std::count_if(plan.begin(), plan.end(), [&](const Question& q) {
          return q.treatment == t && q.reference == r && q.comparison == r;
        });
        EXPECT_EQ(identity, 1);
      }
    }
  }
}

TEST(BuildPlan, TreatmentsAndBlocksAreContiguous) {
  const auto plan = build_plan(config(9));
  for (std::size_t i = 1; i < plan.size(); ++i) {
    if (plan[i].treatment == plan[i - 1].treatment && plan[i].block_index == plan[i - 1].block_index) {
      EXPECT_EQ(plan[i].within_block_index, plan[i - 1].within_block_index + 1);
    }
  }
  int switches = 0;
  for (std::size_t i = 1; i < plan.size(); ++i) switches += plan[i].treatment != plan[i - 1].treatment;
  EXPECT_EQ(switches, 1);
}

TEST(BuildPlan, OptionOrderIsAUniformPermutation) {
  std::map<std::vector<Relation>, int> counts;
  int forced_first = 0, forced_total = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto plan = build_plan(config(seed));
    for (const Question& q : plan) {
      auto sorted = q.option_order;
      std::sort(sorted.begin(), sorted.end());
      auto allowed = allowed_relations(q.treatment);
      std::sort(allowed.begin(), allowed.end());
      ASSERT_EQ(sorted, allowed);
    }
    // One NonForced question per plan keeps the draws independent.
    const auto nf = std::find_if(plan.begin(), plan.end(), [](const Question& q) { return q.treatment == Treatment::NonForced; });
    ++counts[nf->option_order];
    const auto f = std::find_if(plan.begin(), plan.end(), [](const Question& q) { return q.treatment == Treatment::Forced; });
    forced_first += f->option_order[0] == Relation::FirstPreferred;
    ++forced_total;
  }
  ASSERT_EQ(counts.size(), 24u);
  for (const auto& [order, n] : counts) EXPECT_NEAR(n / 10000.0, 1.0 / 24, 0.01);
  EXPECT_NEAR(static_cast<double>(forced_first) / forced_total, 0.5, 0.02);
}

TEST(BuildPlan, SymbolicBlockIsAppended) {
  const auto plan = build_plan(config(5, true));
  ASSERT_EQ(plan.size(), 105u);
  std::vector<int> indices;
  for (std::size_t i = 100; i < 105; ++i) {
    ASSERT_TRUE(plan[i].symbolic.has_value());
    EXPECT_EQ(plan[i].treatment, Treatment::NonForced);
    indices.push_back(plan[i].symbolic->index);
    const auto& c = protocol::symbolic_comparisons()[plan[i].symbolic->index];
    EXPECT_EQ(plan[i].comparison, c.first.resolve(protocol::kSymbolX, protocol::kSymbolY));
    EXPECT_EQ(plan[i].reference, c.second.resolve(protocol::kSymbolX, protocol::kSymbolY));
  }
  std::sort(indices.begin(), indices.end());
  EXPECT_EQ(indices, (std::vector<int>{0, 1, 2, 3, 4}));
  // The served question must not reveal the withheld amounts.
  const std::string served = to_json(plan[100]).dump();
  EXPECT_EQ(served.find("\"x\""), std::string::npos);
}

TEST(SessionConfig, ObjectiveProbabilities) {
  EXPECT_NO_THROW(EventSpec::parse("objective:1/3"));
  EXPECT_NO_THROW(EventSpec::parse("objective:1/2"));
  EXPECT_THROW(EventSpec::parse("objective:1/4"), Error);
  EXPECT_EQ(EventSpec::parse("objective:1/3").to_string(), "objective:1/3");
}

TEST(RecordResponse, TreatmentRules) {
  Session s("t", config(7));
  while (s.in_flight() && s.in_flight()->treatment != Treatment::Forced) {
    const Question& q = *s.in_flight();
    s.record_response(q.id, Relation::Incomparable, 1000 * (q.id + 1));
  }
  ASSERT_NE(s.in_flight(), nullptr);
  const auto id = s.in_flight()->id;
  EXPECT_EQ(code_of([&] { s.record_response(id, Relation::Indifferent, 10000000); }), ErrorCode::ForbiddenRelation);
  EXPECT_EQ(code_of([&] { s.record_response(id, Relation::Incomparable, 10000000); }), ErrorCode::ForbiddenRelation);
  s.record_response(id, Relation::SecondPreferred, 10000000);
  EXPECT_EQ(code_of([&] { s.record_response(id, Relation::SecondPreferred, 10000000); }), ErrorCode::Conflict);
  EXPECT_EQ(code_of([&] { s.record_response(id + 5, Relation::SecondPreferred, 10000000); }), ErrorCode::Conflict);
}

TEST(RecordResponse, NonForcedAcceptsIncomparable) {
  Session s("t", config(8));
  while (s.in_flight()->treatment != Treatment::NonForced) s.record_response(s.in_flight()->id, Relation::FirstPreferred, 0);
  EXPECT_NO_THROW(s.record_response(s.in_flight()->id, Relation::Incomparable, 0));
}

TEST(RecordResponse, ResponseTimesComeFromTheServeMark) {
  Session s("t", config(3));
  s.mark_served(1000);
  const Response& r = s.record_response(0, Relation::FirstPreferred, 4500, 3100);
  EXPECT_EQ(r.response_time_ms, 3500);
  EXPECT_EQ(r.submitted_at_ms, 4500);
  EXPECT_EQ(r.client_response_time_ms, 3100);
  EXPECT_EQ(code_of([&] { s.record_response(1, Relation::FirstPreferred, 4000); }), ErrorCode::InvalidArgument);
}

TEST(RecordBelief, Examples) {
  BeliefReport certain{33, true, std::nullopt};
  EXPECT_NO_THROW(certain.validate());
  BeliefReport range{50, false, std::make_pair(40, 80)};
  EXPECT_NO_THROW(range.validate());
  EXPECT_DOUBLE_EQ(range.estimation_belief().pi, 0.6);
  BeliefReport missing{50, false, std::nullopt};
  EXPECT_THROW(missing.validate(), Error);
  BeliefReport outside{90, false, std::make_pair(40, 80)};
  EXPECT_THROW(outside.validate(), Error);
}

TEST(SessionLifecycle, StatusIsMonotone) {
  Session s("t", config(4));
  EXPECT_EQ(s.status(), SessionStatus::Created);
  EXPECT_EQ(code_of([&] { s.record_belief({50, true, std::nullopt}); }), ErrorCode::InvalidState);
  EXPECT_EQ(code_of([&] { s.finalize(); }), ErrorCode::InvalidState);
  std::int64_t t = 0;
  while (const Question* q = s.in_flight()) {
    s.record_response(q->id, allowed_relations(q->treatment)[0], t += 10);
    EXPECT_NE(s.status(), SessionStatus::Created);
  }
  EXPECT_EQ(s.status(), SessionStatus::AwaitingBelief);
  EXPECT_EQ(s.responses().size(), s.plan().size());
  s.record_belief({50, true, std::nullopt});
  s.finalize();
  EXPECT_EQ(s.status(), SessionStatus::Finalized);
  EXPECT_EQ(code_of([&] { s.mark_served(t); }), ErrorCode::InvalidState);
}

TEST(JsonIo, SessionConfigRoundTrip) {
  SessionConfig cfg = config(99, true);
  cfg.algorithm = Algorithm::Mle;
  cfg.event = EventSpec::parse("objective:1/2");
  const SessionConfig back = session_config_from_json(to_json(cfg));
  EXPECT_EQ(to_json(back), to_json(cfg));
  EXPECT_THROW(session_config_from_json({{"bogus", 1}}), Error);
}
