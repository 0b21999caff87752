#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "elicit/model.hpp"
#include "elicit/money.hpp"

namespace elicit {

/// Payoff expression over integer constants and the unknown amounts X and Y.
///
/// Grammar: sums and differences of terms; a term is a product of factors
/// joined by '*' or juxtaposition ("5x", "2(y+1)"); a factor is an integer,
/// x / y (or the display glyphs % / #), a parenthesised expression, or a
/// unary minus applied to a factor.
class SymbolicPayoff {
 public:
  enum class Op { Const, VarX, VarY, Add, Mul, Neg };

  static SymbolicPayoff parse(std::string_view text);
  static SymbolicPayoff constant(long long c);

  /// Source text as parsed.
  const std::string& text() const { return text_; }
  /// Text with x and y replaced by the display glyphs % and #.
  std::string display_text() const;
  /// Canonical form: associative/commutative + and * flattened with sorted operands.
  std::string canonical() const;

  bool mentions_unknowns() const;

  /// Arithmetic value under the assignment. May be negative.
  Money evaluate(Money x, Money y) const;

  /// Expanded polynomial: (degree of x, degree of y) -> integer coefficient, zero terms removed.
  using Polynomial = std::map<std::pair<int, int>, long long>;
  Polynomial expand() const;

  struct Node {
    Op op;
    long long value = 0;
    std::vector<Node> kids;
  };

 private:
  SymbolicPayoff(std::string text, Node root) : text_(std::move(text)), root_(std::move(root)) {}
  std::string text_;
  Node root_;
};

/// Structural identity after canonical flattening.
bool symbolic_identical(const SymbolicPayoff& a, const SymbolicPayoff& b);

/// Evaluates `a` at (x, y); equivalent to a.evaluate(x, y).
Money symbolic_eval(const SymbolicPayoff& a, Money x, Money y);

/// Lottery whose payoffs may mention the withheld amounts.
struct SymbolicLottery {
  SymbolicPayoff nv;
  SymbolicPayoff v;

  std::string display_text() const { return "(" + nv.display_text() + ", " + v.display_text() + ")"; }
  /// Resolves the payoffs; throws Error(Domain) when a payoff is negative.
  Lottery resolve(Money x, Money y) const;
};

/// Relation judged without knowing X and Y: Indifferent when both payoffs are
/// structurally identical, strict when every payoff difference is a constant
/// once the unknowns cancel and those constants rank one lottery above the
/// other, Incomparable otherwise.
Relation symbolic_relation(const SymbolicLottery& first, const SymbolicLottery& second);

}  // namespace elicit
