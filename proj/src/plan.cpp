#include "elicit/plan.hpp"

#include <algorithm>
#include <cmath>

#include "elicit/error.hpp"
#include "elicit/protocol.hpp"
#include "elicit/rng.hpp"

namespace elicit {

std::string_view to_string(Treatment t) { return t == Treatment::Forced ? "forced" : "non_forced"; }

Treatment parse_treatment(std::string_view text) {
  if (text == "forced") return Treatment::Forced;
  if (text == "non_forced") return Treatment::NonForced;
  throw Error(ErrorCode::Parse, "unknown treatment '" + std::string(text) + "'");
}

std::vector<Relation> allowed_relations(Treatment t) {
  if (t == Treatment::Forced) return {Relation::FirstPreferred, Relation::SecondPreferred};
  return {Relation::FirstPreferred, Relation::SecondPreferred, Relation::Indifferent, Relation::Incomparable};
}

bool is_allowed(Treatment t, Relation r) { return t == Treatment::NonForced || is_strict(r); }

std::string_view to_string(Algorithm a) { return a == Algorithm::Mle ? "mle" : "set-construction"; }

Algorithm parse_algorithm(std::string_view text) {
  if (text == "mle") return Algorithm::Mle;
  if (text == "set-construction") return Algorithm::SetConstruction;
  throw Error(ErrorCode::Parse, "unknown algorithm '" + std::string(text) + "' (expected set-construction or mle)");
}

std::string EventSpec::to_string() const {
  if (kind == Kind::Subjective) return "subjective";
  return "objective:" + std::to_string(numerator) + "/" + std::to_string(denominator);
}

EventSpec EventSpec::parse(std::string_view text) {
  EventSpec e;
  if (text == "subjective") return e;
  constexpr std::string_view prefix = "objective:";
  if (text.substr(0, prefix.size()) != prefix)
    throw Error(ErrorCode::InvalidArgument, "unknown event '" + std::string(text) + "'");
  auto frac = text.substr(prefix.size());
  e.kind = Kind::Objective;
  if (frac == "1/3") {
    e.numerator = 1;
    e.denominator = 3;
  } else if (frac == "1/2") {
    e.numerator = 1;
    e.denominator = 2;
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "objective probability '" + std::string(frac) + "' not offered (only 1/3 and 1/2)");
  }
  e.description = "A card is drawn at random; the stated chance that it reads 'verb' is " + std::string(frac) + ".";
  return e;
}

void SessionConfig::validate() const {
  if (event.kind == EventSpec::Kind::Objective) {
    const bool ok = event.numerator == 1 && (event.denominator == 3 || event.denominator == 2);
    if (!ok) throw Error(ErrorCode::InvalidArgument, "objective probability must be 1/3 or 1/2");
  }
  double total = 0;
  for (double w : payment_weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "payment weights must be >= 0");
    total += w;
  }
  if (total <= 0) throw Error(ErrorCode::InvalidArgument, "payment weights must not all be zero");
  if (event_date.size() != 10 || event_date[4] != '-' || event_date[7] != '-')
    throw Error(ErrorCode::InvalidArgument, "event_date must be YYYY-MM-DD");
}

std::vector<Question> build_plan(const SessionConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.rng_seed, "plan"));

  std::array<Treatment, 2> treatments{Treatment::NonForced, Treatment::Forced};
  rng.shuffle(treatments.begin(), treatments.end());

  std::vector<Question> plan;
  plan.reserve(kLotteryQuestions + kSymbolicQuestions);
  int block = 0;
  auto push = [&](Question q, int within) {
    q.id = static_cast<std::uint32_t>(plan.size());
    q.block_index = block;
    q.within_block_index = within;
    q.option_order = allowed_relations(q.treatment);
    rng.shuffle(q.option_order.begin(), q.option_order.end());
    plan.push_back(std::move(q));
  };

  for (Treatment t : treatments) {
    auto refs = protocol::kReferences;
    rng.shuffle(refs.begin(), refs.end());
    for (const Lottery& ref : refs) {
      std::vector<Lottery> comps(protocol::lotteries().begin(), protocol::lotteries().end());
      rng.shuffle(comps.begin(), comps.end());
      for (std::size_t i = 0; i < comps.size(); ++i) {
        Question q;
        q.reference = ref;
        q.comparison = comps[i];
        q.treatment = t;
        push(std::move(q), static_cast<int>(i));
      }
      ++block;
    }
  }

  if (cfg.include_symbolic_block) {
    const auto& list = protocol::symbolic_comparisons();
    std::array<int, kSymbolicQuestions> order{0, 1, 2, 3, 4};
    rng.shuffle(order.begin(), order.end());
    for (int i = 0; i < kSymbolicQuestions; ++i) {
      const auto& sc = list[order[i]];
      Question q;
      q.symbolic = SymbolicPair{order[i], sc.first, sc.second};
      q.comparison = sc.first.resolve(protocol::kSymbolX, protocol::kSymbolY);
      q.reference = sc.second.resolve(protocol::kSymbolX, protocol::kSymbolY);
      q.treatment = Treatment::NonForced;
      push(std::move(q), i);
    }
    ++block;
  }
  return plan;
}

}  // namespace elicit
