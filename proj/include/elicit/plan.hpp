#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elicit/model.hpp"
#include "elicit/money.hpp"
#include "elicit/symbolic.hpp"

namespace elicit {

enum class Treatment { NonForced, Forced };

std::string_view to_string(Treatment t);
Treatment parse_treatment(std::string_view text);

/// Options a subject may choose under `t`, in canonical order.
std::vector<Relation> allowed_relations(Treatment t);
bool is_allowed(Treatment t, Relation r);

enum class Algorithm { SetConstruction, Mle };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view text);

/// Subjective event, or an objective one with a stated probability of 1/3 or 1/2.
struct EventSpec {
  enum class Kind { Subjective, Objective } kind = Kind::Subjective;
  std::string description = "The dictionary word of the day on the resolution date is a verb.";
  /// Objective probability as a reduced fraction; only 1/3 and 1/2 are accepted.
  int numerator = 0;
  int denominator = 0;

  double objective_probability() const { return static_cast<double>(numerator) / denominator; }
  /// "subjective", "objective:1/3" or "objective:1/2".
  std::string to_string() const;
  static EventSpec parse(std::string_view text);
};

struct SessionConfig {
  static constexpr int kSchemaVersion = 1;

  EventSpec event;
  Algorithm algorithm = Algorithm::SetConstruction;
  bool include_symbolic_block = false;
  std::uint64_t rng_seed = 0;
  /// Resolution date of the event (YYYY-MM-DD); keys operator outcome entry.
  std::string event_date = "2026-01-01";
  /// Weights for {NonForcedAlgorithm, ForcedDirect, BeliefBDM}.
  std::array<double, 3> payment_weights{1.0, 1.0, 1.0};
  /// Estimate the prior jointly with rho in the MLE rule instead of fixing it at the report.
  bool mle_joint_belief = false;

  /// Throws Error(InvalidArgument) when the config is unusable.
  void validate() const;
};

/// Withheld-information comparison shown instead of numeric payoffs.
struct SymbolicPair {
  int index;  // position in protocol::symbolic_comparisons()
  SymbolicLottery first;
  SymbolicLottery second;
};

/// One screen of the plan. Gamble 1 is `comparison`, Gamble 2 is `reference`,
/// so Relation::FirstPreferred means the comparison lottery is ranked above
/// the reference. Symbolic questions carry their expressions in `symbolic`
/// and the resolved (hidden) lotteries in `comparison` / `reference`.
struct Question {
  std::uint32_t id = 0;
  Lottery reference;
  Lottery comparison;
  std::optional<SymbolicPair> symbolic;
  Treatment treatment = Treatment::NonForced;
  int block_index = 0;
  int within_block_index = 0;
  std::vector<Relation> option_order;

  bool is_identity() const { return !symbolic && reference == comparison; }
};

inline constexpr int kLotteryQuestions = 100;
inline constexpr int kSymbolicQuestions = 5;

/// Builds the ordered question plan: treatments in random order, the two
/// reference blocks in random order within each treatment, the 25 comparisons
/// shuffled within each block, and an independent option permutation per
/// question. The optional symbolic block (NonForced) is appended last.
std::vector<Question> build_plan(const SessionConfig& cfg);

}  // namespace elicit
