// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Tolerances and seeds are pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "elicit/agents.hpp"
#include "elicit/analysis.hpp"
#include "elicit/event_log.hpp"
#include "elicit/mle.hpp"
#include "elicit/model.hpp"
#include "elicit/payment.hpp"
#include "elicit/plan.hpp"
#include "elicit/population.hpp"
#include "elicit/protocol.hpp"
#include "elicit/rng.hpp"
#include "elicit/set_construction.hpp"
#include "elicit/simulate.hpp"

#include "oracles.hpp"

using namespace elicit;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Verdict {
  bool pass;
  std::string detail;
};

int g_failures = 0;

void run(const char* name, double time_limit_s, const std::function<Verdict()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = fn();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream d;
  d << v.detail << "; " << secs << " s";
  if (time_limit_s > 0) {
    d << " (limit " << time_limit_s << " s)";
    if (secs >= time_limit_s) v.pass = false;
  }
  if (!v.pass) ++g_failures;
  std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, d.str().c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

PreferenceModel random_model(Rng& rng) {
  const double a = rng.uniform(), b = rng.uniform();
  const bool point_belief = rng.bernoulli(0.2);
  BeliefSet beliefs = point_belief ? BeliefSet::singleton(a) : BeliefSet(std::min(a, b), std::max(a, b));
  switch (rng.uniform_int(0, 3)) {
    case 0:
      return {beliefs, UtilitySet::singleton(UtilityFunction::linear())};
    case 1: {
      std::vector<UtilityFunction> us{UtilityFunction::crra(-0.5 + 2.0 * rng.uniform()),
                                      UtilityFunction::crra(-0.5 + 2.0 * rng.uniform())};
      if (rng.bernoulli(0.5)) us.push_back(UtilityFunction::log());
      return {beliefs, UtilitySet(us)};
    }
    default: {
      const double lo = -0.5 + 2.0 * rng.uniform();
      const double hi = std::min(1.5, lo + 1.0 * rng.uniform());
      return {beliefs, UtilitySet(CrraInterval{lo, hi})};
    }
  }
}

Verdict oracle_equivalence() {
  Rng rng(derive_seed(kSeed, "acceptance-models"));
  std::size_t agree = 0, total = 0;
  std::string first_mismatch;
  for (int m = 0; m < 50; ++m) {
    const PreferenceModel model = random_model(rng);
    for (const Lottery& r : protocol::kReferences) {
      for (const Lottery& p : protocol::lotteries()) {
        const Relation got = compare(p, r, model);
        const Relation want = oracle::grid_compare(p, r, model, 1001);
        ++total;
        if (got == want) ++agree;
        else if (first_mismatch.empty())
          first_mismatch = "; first mismatch model " + std::to_string(m) + " " + p.to_string() + " vs " +
                           r.to_string() + ": " + std::string(to_string(got)) + " vs oracle " +
                           std::string(to_string(want));
      }
    }
  }
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " agree" + first_mismatch};
}

PopulationConfig theory_population() {
  PopulationConfig pop;
  pop.seed = kSeed;
  auto group = [](std::string name, double rho, double spread, double half, CompletionRule c) {
    AgentGroup g;
    g.name = std::move(name);
    g.kind = AgentKind::Deterministic;
    g.count = 50;
    g.belief_center = ParamRange(0.15, 0.7);
    g.belief_half_width = ParamRange(0.0, half);
    g.rho = ParamRange(rho);
    g.rho_spread = ParamRange(0.0, spread);
    g.completion = c;
    return g;
  };
  pop.groups = {group("bewley", 0.0, 0.0, 0.25, CompletionRule::UniformRandom),
                group("aumann", -0.3, 1.2, 0.0, CompletionRule::MaxMinEU),
                group("combined", 0.0, 0.8, 0.2, CompletionRule::FirstOption),
                group("combined-log", 0.5, 0.7, 0.15, CompletionRule::UniformRandom)};
  return pop;
}

bool full_rate(const ConsistencyCell& c) { return c.consistent == c.total; }

Verdict theory_consistency() {
  const auto sessions = simulate_sessions(theory_population());
  const DominanceReport d = dominance_consistency(sessions);
  const TransitivityStats t = transitivity_violations(sessions, Treatment::NonForced);
  std::size_t checked = 0;
  bool ok = true;
  for (const DominanceConsistency* dc : {&d.weak, &d.strict}) {
    for (const ConsistencyCell* c :
         {&dc->incomplete_dominating, &dc->incomplete_dominated, &dc->indifferent_dominating, &dc->indifferent_dominated}) {
      ok = ok && full_rate(*c);
      checked += c->total;
    }
  }
  const bool exercised = d.weak.incomplete_dominating.total > 0 && d.weak.incomplete_dominated.total > 0;
  std::string detail = "dominance consistent on " + std::to_string(checked) + " strict answers (weak incomplete " +
                       std::to_string(d.weak.incomplete_dominating.consistent) + "/" +
                       std::to_string(d.weak.incomplete_dominating.total) + ", " +
                       std::to_string(d.weak.incomplete_dominated.consistent) + "/" +
                       std::to_string(d.weak.incomplete_dominated.total) + "); NonForced strict cycles " +
                       std::to_string(t.strict_violations) + "/" + std::to_string(t.strict_opportunities);
  return {ok && exercised && t.strict_violations == 0, detail};
}

Verdict seu_sanity() {
  PopulationConfig pop;
  pop.seed = kSeed;
  AgentGroup g;
  g.name = "seu";
  g.kind = AgentKind::Deterministic;
  g.count = 200;
  g.belief_center = ParamRange(0.05, 0.95);
  g.rho = ParamRange(-0.5, 1.5);
  g.completion = CompletionRule::UniformRandom;
  pop.groups = {g};
  const auto sessions = simulate_sessions(pop);
  std::size_t incomparable = 0, identity = 0, identity_indifferent = 0;
  for (const Session& s : sessions) {
    for (const Question& q : s.plan()) {
      const Relation r = *s.response_for(q.id);
      if (r == Relation::Incomparable) ++incomparable;
      if (q.treatment == Treatment::NonForced && q.is_identity()) {
        ++identity;
        if (r == Relation::Indifferent) ++identity_indifferent;
      }
    }
  }
  return {incomparable == 0 && identity == 400 && identity_indifferent == identity,
          std::to_string(incomparable) + " Incomparable answers; identity Indifferent " +
              std::to_string(identity_indifferent) + "/" + std::to_string(identity)};
}

Verdict mle_recovery() {
  const double rhos[] = {-0.5, 0.0, 0.3, 0.8, 1.2};
  constexpr int kRuns = 500;
  constexpr double kTolerance = 0.1;
  constexpr double kRequired = 0.90;
  bool ok = true;
  std::string detail = "hit rate |rho_hat - rho| <= 0.1 (need >= 0.90):";
  for (std::uint64_t k = 0; k < std::size(rhos); ++k) {
    const double rho = rhos[k];
    const std::uint64_t stream = derive_seed(kSeed, "mle-recovery", k);
    int hits = 0;
    for (int run = 0; run < kRuns; ++run) {
      const LogitAgent agent{0.5, UtilityFunction::crra(rho), 0.2, 0.0};
      Rng rng(derive_seed(stream, "run", static_cast<std::uint64_t>(run)));
      std::vector<Observation> obs;
      for (const Lottery& r : protocol::kReferences) {
        for (const Lottery& p : protocol::lotteries()) {
          if (p == r) continue;
          Question q;
          q.reference = r;
          q.comparison = p;
          q.treatment = Treatment::NonForced;
          q.option_order = allowed_relations(Treatment::NonForced);
          obs.push_back({p, r, answer(agent, q, rng)});
        }
      }
      if (obs.size() != 48) throw std::logic_error("expected 48 observations");
      const MleFit fit = fit_crra(obs, Belief{0.5});
      if (std::abs(fit.rho - rho) <= kTolerance) ++hits;
    }
    const double rate = static_cast<double>(hits) / kRuns;
    ok = ok && rate >= kRequired;
    detail += " rho=" + fmt(rho).substr(0, 5) + " " + fmt(rate);
  }
  return {ok, detail};
}

Verdict set_construction_fuzz() {
  constexpr int kSequences = 100000;
  Rng meta(derive_seed(kSeed, "fuzz"));
  const auto lots = protocol::lotteries();
  std::size_t replacements = 0, clamped = 0, violations = 0;
  for (int n = 0; n < kSequences; ++n) {
    Rng rng(meta.next());
    const Lottery& reference = protocol::kReferences[meta.index(2)];
    SetPairState state = init_sets(reference, rng);
    const int len = static_cast<int>(meta.uniform_int(1, 40));
    for (int k = 0; k < len; ++k) {
      const Lottery& c = lots[meta.index(lots.size())];
      const auto rel = static_cast<Relation>(meta.uniform_int(0, 3));
      const SetPairState before = state;
      const Rng rng_before = rng;
      apply_response(state, c, rel, rng);
      if (rel == Relation::Incomparable) {
        Rng a = rng_before, b = rng;
        if (!(state == before) || a.next() != b.next()) ++violations;
        continue;
      }
      const std::size_t expected = rel == Relation::Indifferent ? 2 : 1;
      if (state.replacement_log.size() != before.replacement_log.size() + expected) ++violations;
      for (std::size_t i = before.replacement_log.size(); i < state.replacement_log.size(); ++i) {
        const Replacement& rp = state.replacement_log[i];
        ++replacements;
        const int sign = rp.target == Replacement::Target::Better ? 1 : -1;
        if (!(rp.trigger == c)) ++violations;
        if (rp.clamped) {
          ++clamped;
          if (!feasible_steps(c, sign).empty() || !in_lottery_space(rp.inserted)) ++violations;
          continue;
        }
        const std::int64_t shift = sign * rp.step * 100;
        if (rp.step < 1 || rp.step > 5 || rp.inserted.nv.in_cents() != c.nv.in_cents() + shift ||
            rp.inserted.v.in_cents() != c.v.in_cents() + shift || !in_lottery_space(rp.inserted) ||
            protocol::is_protocol_lottery(rp.inserted))
          ++violations;
        const auto& set = rp.target == Replacement::Target::Better ? state.better : state.worse;
        if (!(set[rp.slot] == rp.inserted)) ++violations;
      }
    }
    if (state.better.size() != kSetSize || state.worse.size() != kSetSize) ++violations;
  }

  // Full sessions: answer at random, then rebuild each from its log alone.
  constexpr int kReplays = 300;
  std::size_t replay_mismatch = 0;
  for (int n = 0; n < kReplays; ++n) {
    SessionConfig cfg;
    cfg.rng_seed = meta.next();
    cfg.algorithm = n % 2 ? Algorithm::Mle : Algorithm::SetConstruction;
    cfg.include_symbolic_block = n % 3 == 0;
    std::vector<std::string> lines;
    ManualClock clock;
    LoggedSession live("fuzz-" + std::to_string(n), cfg, clock, [&](const std::string& l) { lines.push_back(l); });
    while (const Question* q = live.serve()) {
      const auto opts = allowed_relations(q->treatment);
      clock.advance(meta.uniform_int(500, 20000));
      live.respond(q->id, opts[meta.index(opts.size())]);
    }
    BeliefReport b;
    b.point_pct = static_cast<int>(meta.uniform_int(0, 100));
    b.certain = meta.bernoulli(0.5);
    if (!b.certain) b.range_pct = std::make_pair(std::max(0, b.point_pct - 10), std::min(100, b.point_pct + 5));
    live.record_belief(b);
    live.finalize();
    live.enter_outcome(meta.bernoulli(0.5) ? EventState::Verb : EventState::NotVerb);

    std::vector<LogEvent> events;
    for (const auto& l : lines) events.push_back(LogEvent::from_line(l));
    ManualClock replay_clock;
    const LoggedSession rebuilt = LoggedSession::replay(events, replay_clock);
    if (!rebuilt.payment() || !(*rebuilt.payment() == *live.payment()) ||
        to_json(*rebuilt.payment()).dump() != to_json(*live.payment()).dump() || !rebuilt.logged_payment() ||
        *rebuilt.logged_payment() != to_json(*live.payment()))
      ++replay_mismatch;
  }
  return {violations == 0 && replay_mismatch == 0,
          std::to_string(kSequences) + " sequences, " + std::to_string(replacements) + " replacements (" +
              std::to_string(clamped) + " clamped), " + std::to_string(violations) + " invariant violations; " +
              std::to_string(kReplays - replay_mismatch) + "/" + std::to_string(kReplays) +
              " session replays bit-exact"};
}

Verdict mixed_correlation() {
  const auto sessions = simulate_sessions(scenario_config("mixed", kSeed));
  const ReversalReport r = reversal_analysis(sessions);
  const bool ok = sessions.size() == 200 && r.pearson[0] && r.pearson[1] && *r.pearson[0] > 0.5 && *r.pearson[1] > 0.5;
  auto show = [](const std::optional<double>& x) { return x ? fmt(*x) : std::string("absent"); };
  return {ok, "Pearson r (9,11) " + show(r.pearson[0]) + ", (14,2) " + show(r.pearson[1]) + " (need > 0.5 both)"};
}

Verdict forced_ordering() {
  const char* names[] = {"trembling-eps-0", "trembling-eps-0.05", "trembling-eps-0.1"};
  std::vector<double> forced, nonforced;
  for (const char* n : names) {
    const auto sessions = simulate_sessions(scenario_config(n, kSeed));
    forced.push_back(transitivity_violations(sessions, Treatment::Forced).strict_rate().value_or(0.0));
    nonforced.push_back(transitivity_violations(sessions, Treatment::NonForced).strict_rate().value_or(0.0));
  }
  bool ok = forced[0] <= forced[1] && forced[1] <= forced[2];
  for (int i = 1; i < 3; ++i) ok = ok && forced[i] > nonforced[i];
  std::string detail = "Forced/NonForced strict-cycle rate:";
  for (int i = 0; i < 3; ++i) detail += std::string(" ") + names[i] + " " + fmt(forced[i]) + "/" + fmt(nonforced[i]);
  return {ok, detail};
}

Verdict symbolic_pattern() {
  SessionConfig cfg;
  cfg.rng_seed = kSeed;
  cfg.include_symbolic_block = true;
  const auto plan = build_plan(cfg);
  const Relation expected[] = {Relation::Indifferent, Relation::FirstPreferred, Relation::Incomparable,
                               Relation::Incomparable, Relation::Incomparable};
  const AgentSpec agent = DeterministicAgent{PreferenceModel::seu(0.5), CompletionRule::UniformRandom};
  Rng rng(derive_seed(kSeed, "symbolic"));
  int matched = 0, seen = 0;
  std::string detail;
  for (const Question& q : plan) {
    if (!q.symbolic) continue;
    ++seen;
    const Relation got = answer(agent, q, rng);
    const Relation want = expected[q.symbolic->index];
    if (got == want && oracle::symbolic_relation(*q.symbolic) == want) ++matched;
    detail += std::string(detail.empty() ? "" : ", ") + std::string(protocol::symbolic_comparisons()[q.symbolic->index].label) +
              "=" + std::string(to_string(got));
  }
  return {seen == 5 && matched == 5, std::to_string(matched) + "/5 exact (" + detail + ")"};
}

Verdict distance_structure() {
  const auto sessions = simulate_sessions(scenario_config("bewley-population", kSeed));
  std::optional<double> incomparable, indifferent;
  std::size_t n_inc = 0, n_ind = 0;
  for (const DistanceRow& row : distance_stats(sessions)) {
    if (!(row.reference == protocol::kSkewedReference)) continue;
    if (row.kind == Relation::Incomparable) incomparable = row.mean, n_inc = row.n;
    if (row.kind == Relation::Indifferent) indifferent = row.mean, n_ind = row.n;
  }
  const bool ok = sessions.size() == 200 && incomparable && indifferent && *incomparable > *indifferent;
  return {ok, "vs (14,2): Incomparable mean " + (incomparable ? fmt(*incomparable) : "absent") + " (n=" +
                  std::to_string(n_inc) + ") vs Indifferent mean " + (indifferent ? fmt(*indifferent) : "absent") +
                  " (n=" + std::to_string(n_ind) + ")"};
}

}  // namespace

int main() {
  run("oracle-equivalence", 10, oracle_equivalence);
  run("theory-consistency", 0, theory_consistency);
  run("seu-sanity", 0, seu_sanity);
  run("mle-recovery", 60, mle_recovery);
  run("set-construction-fuzz", 0, set_construction_fuzz);
  run("mixed-reversal-correlation", 120, mixed_correlation);
  run("forced-vs-nonforced-ordering", 0, forced_ordering);
  run("symbolic-treatment", 0, symbolic_pattern);
  run("distance-structure", 0, distance_structure);
  std::printf("%d criteria failed\n", g_failures);
  return g_failures ? 1 : 0;
}
