#include "elicit/set_construction.hpp"

#include <algorithm>

#include "elicit/protocol.hpp"

namespace elicit {

namespace {

Lottery random_lottery(Rng& rng) {
  const auto hi = kMaxPayoff.in_cents();
  Money nv = Money::cents(rng.uniform_int(0, hi));
  Money v = Money::cents(rng.uniform_int(0, hi));
  return Lottery{nv, v};
}

Lottery shifted(const Lottery& p, int sign, int step) {
  Money d = Money::dollars(sign * step);
  return Lottery{p.nv + d, p.v + d};
}

Money clamp_money(Money m) { return std::clamp(m, Money{}, kMaxPayoff); }

void replace(SetPairState& s, Replacement::Target target, const Lottery& comparison, Rng& rng) {
  const int sign = target == Replacement::Target::Better ? 1 : -1;
  auto steps = feasible_steps(comparison, sign);
  Replacement rec{target, 0, {}, {}, comparison, 1, steps.empty()};
  if (steps.empty()) {
    Lottery raw = shifted(comparison, sign, 1);
    rec.inserted = Lottery{clamp_money(raw.nv), clamp_money(raw.v)};
  } else {
    rec.step = steps[rng.index(steps.size())];
    rec.inserted = shifted(comparison, sign, rec.step);
  }
  auto& set = target == Replacement::Target::Better ? s.better : s.worse;
  rec.slot = rng.index(set.size());
  rec.removed = set[rec.slot];
  set[rec.slot] = rec.inserted;
  s.replacement_log.push_back(rec);
}

}  // namespace

SetPairState init_sets(const Lottery& reference, Rng& rng) {
  SetPairState s;
  s.reference = reference;
  for (auto& l : s.better) l = random_lottery(rng);
  for (auto& l : s.worse) l = random_lottery(rng);
  return s;
}

std::vector<int> feasible_steps(const Lottery& comparison, int sign) {
  std::vector<int> out;
  for (int i = 1; i <= 5; ++i) {
    Lottery l = shifted(comparison, sign, i);
    if (in_lottery_space(l) && !protocol::is_protocol_lottery(l)) out.push_back(i);
  }
  return out;
}

void apply_response(SetPairState& state, const Lottery& comparison, Relation rel, Rng& rng) {
  switch (rel) {
    case Relation::FirstPreferred:
      replace(state, Replacement::Target::Better, comparison, rng);
      break;
    case Relation::SecondPreferred:
      replace(state, Replacement::Target::Worse, comparison, rng);
      break;
    case Relation::Indifferent:
      replace(state, Replacement::Target::Better, comparison, rng);
      replace(state, Replacement::Target::Worse, comparison, rng);
      break;
    case Relation::Incomparable:
      break;
  }
}

SetSettlement settle_sets(const SetPairState& state, Rng& rng) {
  SetSettlement out{};
  out.better_branch = rng.bernoulli(0.5);
  if (out.better_branch) {
    out.slot = rng.index(state.better.size());
    out.paid = state.better[out.slot];
  } else {
    out.slot = 0;
    out.paid = state.reference;
  }
  return out;
}

}  // namespace elicit
