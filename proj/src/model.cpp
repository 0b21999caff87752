#include "elicit/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "elicit/error.hpp"

namespace elicit {

BeliefSet::BeliefSet(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi))
    throw Error(ErrorCode::InvalidArgument, "belief set must satisfy 0 <= lo <= hi <= 1");
}

UtilityFunction UtilityFunction::crra(double rho) {
  if (!std::isfinite(rho)) throw Error(ErrorCode::InvalidArgument, "CRRA parameter must be finite");
  if (rho == 0.0) return linear();
  if (rho == 1.0) return log();
  return UtilityFunction(UtilityKind::Crra, rho);
}

double UtilityFunction::operator()(double x) const {
  if (x < 0.0) throw Error(ErrorCode::Domain, "utility of a negative payoff");
  switch (kind_) {
    case UtilityKind::Linear:
      return x;
    case UtilityKind::Log:
      if (x == 0.0) throw Error(ErrorCode::Domain, "log utility at payoff 0");
      return std::log(x);
    case UtilityKind::Crra: {
      if (x == 0.0) {
        if (rho_ >= 1.0) throw Error(ErrorCode::Domain, "CRRA utility with rho >= 1 at payoff 0");
        return -1.0 / (1.0 - rho_);
      }
      // expm1 keeps precision as rho approaches 1.
      const double k = 1.0 - rho_;
      return std::expm1(k * std::log(x)) / k;
    }
  }
  return 0.0;
}

UtilitySet::UtilitySet(std::vector<UtilityFunction> members) : rep_(std::move(members)) {
  if (std::get<0>(rep_).empty()) throw Error(ErrorCode::InvalidArgument, "utility set must be nonempty");
}

UtilitySet::UtilitySet(CrraInterval interval) : rep_(interval) {
  if (!(std::isfinite(interval.lo) && std::isfinite(interval.hi) && interval.lo <= interval.hi))
    throw Error(ErrorCode::InvalidArgument, "CRRA interval requires rho_lo <= rho_hi");
}

bool UtilitySet::is_singleton() const {
  if (is_interval()) return interval().lo == interval().hi;
  return members().size() == 1;
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::FirstPreferred: return "first";
    case Relation::SecondPreferred: return "second";
    case Relation::Indifferent: return "indifferent";
    case Relation::Incomparable: return "incomparable";
  }
  return "?";
}

Relation parse_relation(std::string_view text) {
  if (text == "first") return Relation::FirstPreferred;
  if (text == "second") return Relation::SecondPreferred;
  if (text == "indifferent") return Relation::Indifferent;
  if (text == "incomparable") return Relation::Incomparable;
  throw Error(ErrorCode::Parse, "unknown relation '" + std::string(text) + "'");
}

Relation mirror(Relation r) {
  if (r == Relation::FirstPreferred) return Relation::SecondPreferred;
  if (r == Relation::SecondPreferred) return Relation::FirstPreferred;
  return r;
}

double expected_utility(const Lottery& p, Belief belief, const UtilityFunction& u) {
  const double uv = u(p.v);
  const double unv = u(p.nv);
  return belief.pi * uv + (1.0 - belief.pi) * unv;
}

namespace {

struct SignTally {
  bool pos = false;
  bool neg = false;
  double tol;

  void add(double d) {
    if (d > tol) pos = true;
    else if (d < -tol) neg = true;
  }
  bool both() const { return pos && neg; }
};

std::vector<double> belief_extremes(const BeliefSet& b) {
  if (b.is_singleton()) return {b.lo()};
  return {b.lo(), b.hi()};
}

double eu_difference(const Lottery& p, const Lottery& q, double pi, const UtilityFunction& u) {
  return expected_utility(p, Belief{pi}, u) - expected_utility(q, Belief{pi}, u);
}

// Calls visit(value) for every point checked along a CRRA interval, including
// interior extrema located by derivative-sign bisection between grid points.
template <class F, class Visit>
void scan_crra_interval(const CrraInterval& iv, int grid, F&& f, Visit&& visit) {
  if (iv.lo == iv.hi) {
    visit(f(iv.lo));
    return;
  }
  const int n = std::max(grid, 3);
  const double step = (iv.hi - iv.lo) / (n - 1);
  std::vector<double> rhos(n), vals(n);
  for (int k = 0; k < n; ++k) {
    rhos[k] = k == n - 1 ? iv.hi : iv.lo + step * k;
    vals[k] = f(rhos[k]);
    visit(vals[k]);
  }
  const double h = step * 1e-4;
  auto slope = [&](double r) {
    double a = std::max(iv.lo, r - h), b = std::min(iv.hi, r + h);
    return f(b) - f(a);
  };
  for (int k = 1; k + 1 < n; ++k) {
    const double left = vals[k] - vals[k - 1];
    const double right = vals[k + 1] - vals[k];
    if (!((left > 0 && right < 0) || (left < 0 && right > 0))) continue;
    double a = rhos[k - 1], b = rhos[k + 1];
    const bool rising_at_a = left > 0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (a + b);
      if ((slope(mid) > 0) == rising_at_a) a = mid;
      else b = mid;
    }
    visit(f(0.5 * (a + b)));
  }
}

}  // namespace

Relation compare(const Lottery& p, const Lottery& q, const PreferenceModel& m, const CompareOptions& opts) {
  SignTally tally{.tol = opts.tolerance};
  const auto pis = belief_extremes(m.beliefs);
  for (double pi : pis) {
    if (m.utilities.is_interval()) {
      scan_crra_interval(
          m.utilities.interval(), opts.rho_grid,
          [&](double rho) { return eu_difference(p, q, pi, UtilityFunction::crra(rho)); },
          [&](double d) { tally.add(d); });
    } else {
      for (const auto& u : m.utilities.members()) tally.add(eu_difference(p, q, pi, u));
    }
    if (tally.both()) return Relation::Incomparable;
  }
  if (tally.pos) return Relation::FirstPreferred;
  if (tally.neg) return Relation::SecondPreferred;
  return Relation::Indifferent;
}

double min_expected_utility(const Lottery& p, const PreferenceModel& m, int rho_grid) {
  double best = std::numeric_limits<double>::infinity();
  for (double pi : belief_extremes(m.beliefs)) {
    if (m.utilities.is_interval()) {
      scan_crra_interval(
          m.utilities.interval(), rho_grid,
          [&](double rho) { return expected_utility(p, Belief{pi}, UtilityFunction::crra(rho)); },
          [&](double v) { best = std::min(best, v); });
    } else {
      for (const auto& u : m.utilities.members()) best = std::min(best, expected_utility(p, Belief{pi}, u));
    }
  }
  return best;
}

}  // namespace elicit
