#include "elicit/agents.hpp"

#include <cmath>

#include "elicit/error.hpp"
#include "elicit/symbolic.hpp"

namespace elicit {

std::string_view to_string(CompletionRule c) {
  switch (c) {
    case CompletionRule::UniformRandom: return "uniform-random";
    case CompletionRule::MaxMinEU: return "maxmin-eu";
    case CompletionRule::FirstOption: return "first-option";
  }
  return "?";
}

CompletionRule parse_completion_rule(std::string_view text) {
  if (text == "uniform-random") return CompletionRule::UniformRandom;
  if (text == "maxmin-eu") return CompletionRule::MaxMinEU;
  if (text == "first-option") return CompletionRule::FirstOption;
  throw Error(ErrorCode::InvalidArgument, "unknown completion rule '" + std::string(text) + "'");
}

AgentSpec trembling(AgentSpec inner, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error(ErrorCode::InvalidArgument, "tremble epsilon must lie in [0, 1]");
  return std::make_shared<const TremblingAgent>(TremblingAgent{std::move(inner), epsilon});
}

PreferenceModel agent_model(const AgentSpec& a) {
  struct V {
    PreferenceModel operator()(const DeterministicAgent& d) const { return d.model; }
    PreferenceModel operator()(const LogitAgent& l) const { return PreferenceModel::seu(l.belief, l.utility); }
    PreferenceModel operator()(const std::shared_ptr<const TremblingAgent>& t) const { return agent_model(t->inner); }
  };
  return std::visit(V{}, a);
}

std::int64_t simulated_response_time(Relation r, Rng& rng) {
  const std::int64_t base = is_strict(r) ? 8000 : 9500;
  return base + rng.uniform_int(0, 3999);
}

namespace {

Relation complete(const DeterministicAgent& d, const Question& q, Rng& rng) {
  switch (d.completion) {
    case CompletionRule::UniformRandom:
      return rng.bernoulli(0.5) ? Relation::FirstPreferred : Relation::SecondPreferred;
    case CompletionRule::MaxMinEU: {
      const double a = min_expected_utility(q.comparison, d.model);
      const double b = min_expected_utility(q.reference, d.model);
      if (a > b) return Relation::FirstPreferred;
      if (b > a) return Relation::SecondPreferred;
      return q.option_order.front();
    }
    case CompletionRule::FirstOption:
      return q.option_order.front();
  }
  return Relation::FirstPreferred;
}

Relation answer_deterministic(const DeterministicAgent& d, const Question& q, Rng& rng) {
  const Relation truth = q.symbolic ? symbolic_relation(q.symbolic->first, q.symbolic->second)
                                    : compare(q.comparison, q.reference, d.model);
  if (q.treatment == Treatment::NonForced || is_strict(truth)) return truth;
  return complete(d, q, rng);
}

Relation answer_logit(const LogitAgent& l, const Question& q, Rng& rng) {
  const bool can_indiff = q.treatment == Treatment::NonForced;
  if (q.symbolic) {
    Relation r = symbolic_relation(q.symbolic->first, q.symbolic->second);
    if (r == Relation::Incomparable || (r == Relation::Indifferent && !can_indiff))
      return rng.bernoulli(0.5) ? Relation::FirstPreferred : Relation::SecondPreferred;
    return r;
  }
  const double d = expected_utility(q.comparison, Belief{l.belief}, l.utility) -
                   expected_utility(q.reference, Belief{l.belief}, l.utility);
  if (can_indiff && std::abs(d) < l.indifference_band) return Relation::Indifferent;
  const double p_first = 1.0 / (1.0 + std::exp(-d / l.sigma));
  return rng.bernoulli(p_first) ? Relation::FirstPreferred : Relation::SecondPreferred;
}

}  // namespace

Relation answer(const AgentSpec& a, const Question& q, Rng& rng) {
  struct V {
    const Question& q;
    Rng& rng;
    Relation operator()(const DeterministicAgent& d) const { return answer_deterministic(d, q, rng); }
    Relation operator()(const LogitAgent& l) const { return answer_logit(l, q, rng); }
    Relation operator()(const std::shared_ptr<const TremblingAgent>& t) const {
      // Draw the tremble first so the inner agent's stream is consumed identically either way.
      const bool tremble = rng.bernoulli(t->epsilon);
      const Relation inner = answer(t->inner, q, rng);
      if (!tremble) return inner;
      const auto opts = allowed_relations(q.treatment);
      return opts[rng.index(opts.size())];
    }
  };
  return std::visit(V{q, rng}, a);
}

BeliefReport report_belief(const AgentSpec& a) {
  const auto m = agent_model(a);
  auto pct = [](double p) { return static_cast<int>(std::lround(p * 100.0)); };
  BeliefReport b;
  if (m.beliefs.is_singleton()) {
    b.point_pct = pct(m.beliefs.lo());
    b.certain = true;
    return b;
  }
  b.certain = false;
  b.range_pct = std::pair{pct(m.beliefs.lo()), pct(m.beliefs.hi())};
  b.point_pct = std::clamp(pct(m.beliefs.midpoint()), b.range_pct->first, b.range_pct->second);
  if (b.range_pct->first == b.range_pct->second) {
    b.certain = true;
    b.range_pct.reset();
  }
  return b;
}

}  // namespace elicit
