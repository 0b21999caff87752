#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "elicit/money.hpp"

namespace elicit {

/// Probability of the Verb state.
struct Belief {
  double pi = 0.5;
};

/// Interval [lo, hi] of priors over Verb; a singleton when lo == hi.
class BeliefSet {
 public:
  BeliefSet(double lo, double hi);
  static BeliefSet singleton(double pi) { return BeliefSet(pi, pi); }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool is_singleton() const { return lo_ == hi_; }
  bool contains(double pi) const { return pi >= lo_ && pi <= hi_; }
  double midpoint() const { return 0.5 * (lo_ + hi_); }

 private:
  double lo_;
  double hi_;
};

enum class UtilityKind { Linear, Crra, Log };

/// Strictly increasing Bernoulli utility over money.
///
/// CRRA uses u(x) = (x^(1-rho) - 1) / (1 - rho), which is continuous in rho
/// and equals ln x at rho = 1. `crra(0)` and `crra(1)` normalise to Linear and
/// Log respectively; Linear is u(x) = x, which differs from CRRA(0) only by a
/// constant and therefore ranks lotteries identically.
class UtilityFunction {
 public:
  static UtilityFunction linear() { return UtilityFunction(UtilityKind::Linear, 0.0); }
  static UtilityFunction log() { return UtilityFunction(UtilityKind::Log, 1.0); }
  static UtilityFunction crra(double rho);

  UtilityKind kind() const { return kind_; }
  /// Relative risk aversion; 0 for Linear, 1 for Log.
  double rho() const { return rho_; }

  /// Throws Error(Domain) for x < 0, or x == 0 when rho >= 1.
  double operator()(double x) const;
  double operator()(Money x) const { return (*this)(x.to_double()); }

  bool operator==(const UtilityFunction&) const = default;

 private:
  UtilityFunction(UtilityKind k, double rho) : kind_(k), rho_(rho) {}
  UtilityKind kind_;
  double rho_;
};

/// Closed CRRA parameter interval {CRRA(rho) : rho in [lo, hi]}.
struct CrraInterval {
  double lo;
  double hi;
};

/// Nonempty finite list of utilities, or a CRRA interval.
class UtilitySet {
 public:
  UtilitySet(std::vector<UtilityFunction> members);
  UtilitySet(CrraInterval interval);
  static UtilitySet singleton(UtilityFunction u) { return UtilitySet(std::vector<UtilityFunction>{u}); }

  bool is_interval() const { return std::holds_alternative<CrraInterval>(rep_); }
  bool is_singleton() const;
  const std::vector<UtilityFunction>& members() const { return std::get<std::vector<UtilityFunction>>(rep_); }
  const CrraInterval& interval() const { return std::get<CrraInterval>(rep_); }

 private:
  std::variant<std::vector<UtilityFunction>, CrraInterval> rep_;
};

/// Multi-prior, multi-utility preference: p is weakly preferred to q iff its
/// expected utility is at least q's for every prior in `beliefs` and every
/// utility in `utilities`.
struct PreferenceModel {
  BeliefSet beliefs;
  UtilitySet utilities;

  static PreferenceModel seu(double pi, UtilityFunction u = UtilityFunction::linear()) {
    return {BeliefSet::singleton(pi), UtilitySet::singleton(u)};
  }
};

/// Relation of Gamble 1 to Gamble 2.
enum class Relation { FirstPreferred, SecondPreferred, Indifferent, Incomparable };

std::string_view to_string(Relation r);
Relation parse_relation(std::string_view text);
Relation mirror(Relation r);
inline bool is_strict(Relation r) { return r == Relation::FirstPreferred || r == Relation::SecondPreferred; }

double expected_utility(const Lottery& p, Belief belief, const UtilityFunction& u);

/// |EU difference| at or below this counts as equality.
inline constexpr double kEqualityTolerance = 1e-9;

struct CompareOptions {
  /// rho grid size used when the utility set is a CRRA interval.
  int rho_grid = 101;
  double tolerance = kEqualityTolerance;
};

/// Ranks p against q under every (prior, utility) pair of `m`.
///
/// The EU difference is affine in the prior, so the two ends of the belief
/// interval are exact. Finite utility sets are enumerated. For a CRRA interval
/// the difference is evaluated on a rho grid including both ends, and every
/// interior extremum bracketed by the grid is located by bisection on the
/// sign of its derivative and evaluated as well.
Relation compare(const Lottery& p, const Lottery& q, const PreferenceModel& m, const CompareOptions& opts = {});

/// min over the model's (prior, utility) pairs of EU(p). Used by the
/// ambiguity-averse completion rule.
double min_expected_utility(const Lottery& p, const PreferenceModel& m, int rho_grid = 101);

}  // namespace elicit
