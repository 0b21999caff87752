#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

#include "elicit/money.hpp"
#include "elicit/symbolic.hpp"

namespace elicit::protocol {

/// The 25 comparison lotteries, including both references.
std::span<const Lottery> lotteries();

inline constexpr Lottery kSymmetricReference = lottery(9, 11);
inline constexpr Lottery kSkewedReference = lottery(14, 2);
inline constexpr std::array<Lottery, 2> kReferences{kSymmetricReference, kSkewedReference};

bool is_protocol_lottery(const Lottery& p);

/// Unasked question used by the MLE payment rule.
inline constexpr Lottery kMlePaymentFirst = lottery(14, 2);
inline constexpr Lottery kMlePaymentSecond = lottery(9, 5);

/// Withheld amounts behind the symbolic payoffs.
inline constexpr Money kSymbolX = Money::dollars(2);
inline constexpr Money kSymbolY = Money::dollars(5);

struct SymbolicComparison {
  std::string_view label;
  SymbolicLottery first;
  SymbolicLottery second;
};

/// The five withheld-information comparisons, in presentation-list order.
const std::array<SymbolicComparison, 5>& symbolic_comparisons();

/// Versioned static instruction content.
inline constexpr int kInstructionVersion = 1;
std::string_view option_label(int relation_index);
std::string_view treatment_instructions(bool forced);
std::string_view algorithm_summary();
std::string_view algorithm_details(bool mle);

/// BDM bet size.
inline constexpr Money kBdmPrize = Money::dollars(5);

}  // namespace elicit::protocol
