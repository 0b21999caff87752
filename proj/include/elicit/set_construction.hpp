#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "elicit/model.hpp"
#include "elicit/money.hpp"
#include "elicit/rng.hpp"

namespace elicit {

inline constexpr std::size_t kSetSize = 10;

/// One replacement made in response to a ranking.
struct Replacement {
  enum class Target { Better, Worse } target;
  std::size_t slot;
  Lottery removed;
  Lottery inserted;
  Lottery trigger;  // comparison lottery that caused the replacement
  int step;         // i in [1, 5]
  bool clamped;     // no feasible step; coordinates clamped to [0, 20]

  bool operator==(const Replacement&) const = default;
};

/// Better-than / worse-than sets for one reference lottery.
struct SetPairState {
  Lottery reference;
  std::array<Lottery, kSetSize> better;
  std::array<Lottery, kSetSize> worse;
  std::vector<Replacement> replacement_log;

  bool operator==(const SetPairState&) const = default;
};

/// Draws 20 lotteries uniformly from the integer-cent grid on [0, 20]^2.
SetPairState init_sets(const Lottery& reference, Rng& rng);

/// Steps i in [1, 5] that keep comparison + sign * (i, i) inside [0, 20]^2
/// and off every protocol lottery.
std::vector<int> feasible_steps(const Lottery& comparison, int sign);

/// Updates the sets for a ranking of `comparison` (Gamble 1) against the reference.
/// FirstPreferred inserts comparison + (i, i) into `better`; SecondPreferred
/// inserts comparison - (i, i) into `worse`; Indifferent does both;
/// Incomparable leaves the state untouched and consumes no randomness.
void apply_response(SetPairState& state, const Lottery& comparison, Relation rel, Rng& rng);

struct SetSettlement {
  bool better_branch;
  std::size_t slot;  // meaningful on the better branch
  Lottery paid;
};

/// Fair coin between a uniform member of `better` and the reference lottery.
SetSettlement settle_sets(const SetPairState& state, Rng& rng);

}  // namespace elicit
