#pragma once

#include <array>
#include <optional>
#include <string_view>

#include <json.hpp>

#include "elicit/mle.hpp"
#include "elicit/money.hpp"
#include "elicit/rng.hpp"
#include "elicit/session.hpp"
#include "elicit/set_construction.hpp"

namespace elicit {

enum class PaymentSource { NonForcedAlgorithm, ForcedDirect, BeliefBDM };

std::string_view to_string(PaymentSource s);
PaymentSource parse_payment_source(std::string_view text);

/// The paid decision and, once the event is resolved, the amount.
struct PaymentOutcome {
  PaymentSource source = PaymentSource::NonForcedAlgorithm;
  std::optional<Lottery> paid_lottery;
  std::optional<Money> paid_amount;
  std::optional<EventState> resolution;
  nlohmann::json audit_trail = nlohmann::json::object();

  bool pending() const { return !paid_amount.has_value(); }
  bool operator==(const PaymentOutcome&) const = default;
};

nlohmann::json to_json(const PaymentOutcome& p);
PaymentOutcome payment_from_json(const nlohmann::json& j);

/// Random cutoff k on {0..100}. Above the reported percent the subject holds a
/// lottery winning the prize with probability k/100; otherwise the prize is
/// paid iff the event is Verb.
struct BdmDraw {
  int k = 0;
  bool lottery_branch = false;
  int lottery_draw = 0;  // uniform on {0..99}; the lottery wins iff draw < k
};

BdmDraw draw_bdm(const BeliefReport& report, Rng& rng);
Money resolve_bdm(const BdmDraw& d, EventState outcome);
PaymentOutcome settle_bdm(const BeliefReport& report, Rng& rng, EventState outcome);

/// Incentive-algorithm state rebuilt from a session's NonForced lottery answers.
struct AlgorithmStates {
  std::array<SetPairState, 2> sets;  // indexed like protocol::kReferences
  MleState mle;
};

/// Deterministic in the session seed and the response sequence.
AlgorithmStates run_algorithms(const Session& s);

/// Picks the paid decision; the amount stays pending until `resolve_payment`.
/// Requires a recorded belief.
PaymentOutcome select_paid_decision(const Session& s, const AlgorithmStates& states);

/// Fills amount and resolution. Idempotent for the same outcome.
void resolve_payment(PaymentOutcome& p, EventState outcome);

/// select_paid_decision followed by resolve_payment when `outcome` is known.
PaymentOutcome settle_session(const Session& s, std::optional<EventState> outcome);

}  // namespace elicit
