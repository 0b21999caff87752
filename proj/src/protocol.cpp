#include "elicit/protocol.hpp"

#include <algorithm>

namespace elicit::protocol {

namespace {

constexpr std::array<Lottery, 25> kLotteries{
    lottery(5, 19),  lottery(5, 16),  lottery(6, 18),  lottery(7, 10), lottery(7, 16),
    lottery(8, 17),  lottery(7, 19),  lottery(8, 13),  lottery(6, 12), lottery(9, 14),
    lottery(9, 9),   lottery(9, 11),  lottery(10, 8),  lottery(10, 13), lottery(10, 6),
    lottery(13, 3),  lottery(16, 3),  lottery(11, 5),  lottery(12, 1), lottery(11, 10),
    lottery(12, 6),  lottery(14, 2),  lottery(14, 4),  lottery(17, 1), lottery(12, 8),
};

SymbolicLottery sym(std::string_view nv, std::string_view v) {
  return SymbolicLottery{SymbolicPayoff::parse(nv), SymbolicPayoff::parse(v)};
}

}  // namespace

std::span<const Lottery> lotteries() { return kLotteries; }

bool is_protocol_lottery(const Lottery& p) {
  return std::find(kLotteries.begin(), kLotteries.end(), p) != kLotteries.end();
}

const std::array<SymbolicComparison, 5>& symbolic_comparisons() {
  static const std::array<SymbolicComparison, 5> list{
      SymbolicComparison{"identity", sym("14", "x"), sym("14", "x")},
      SymbolicComparison{"shared-unknown", sym("14", "x"), sym("8", "x")},
      SymbolicComparison{"distinct-unknowns", sym("14", "x"), sym("14", "y")},
      SymbolicComparison{"complex-1", sym("14", "5-3x+y+(1*-2)"), sym("7+(1-x)+2*y-(6+4)", "19")},
      SymbolicComparison{"complex-2", sym("5", "6+5x-2(y+1)"), sym("5", "8-y+3x-(2*3)")},
  };
  return list;
}

std::string_view option_label(int relation_index) {
  static constexpr std::array<std::string_view, 4> labels{
      "Gamble 1 is better for me",
      "Gamble 2 is better for me",
      "Both gambles are equally good for me",
      "I cannot say which gamble is better for me",
  };
  return labels.at(static_cast<std::size_t>(relation_index));
}

std::string_view treatment_instructions(bool forced) {
  if (forced)
    return "Each screen shows two gambles. Choose the gamble you would rather have. If neither answer "
           "feels right, still pick the one closer to your view.";
  return "Each screen shows two gambles. Tell us whether Gamble 1 is better, Gamble 2 is better, they "
         "are equally good, or that you cannot say. Gamble 2 is the same on every screen of a section; "
         "Gamble 1 changes.";
}

std::string_view algorithm_summary() {
  return "Your answers in this part are not paid directly. An algorithm learns which gambles you like "
         "from them and pays you a gamble it predicts you prefer in a decision you never see. Rankings "
         "and equal rankings are used by the algorithm; questions where you say you do not know are "
         "left out.";
}

std::string_view algorithm_details(bool mle) {
  if (mle)
    return "The algorithm fits a constant relative risk aversion utility function by maximum likelihood "
           "to the questions you ranked, then pays the gamble that the fitted model prefers in a fixed "
           "question that you are not asked. Questions marked 'do not know' are not used in the fit.";
  return "The algorithm keeps a list of 10 gambles better than the fixed gamble and 10 worse than it, "
         "both starting out random. Ranking a gamble above the fixed one puts a slightly better gamble "
         "into the better list; ranking it below puts a slightly worse one into the worse list; equal "
         "rankings update both. 'Do not know' changes nothing. At payment a coin picks either a random "
         "gamble from the better list or the fixed gamble.";
}

}  // namespace elicit::protocol
