#include "elicit/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "elicit/error.hpp"
#include "elicit/protocol.hpp"

namespace elicit {

void MleState::add(const Observation& o) {
  if (o.relation == Relation::Incomparable) return;
  observations_.push_back(o);
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

// log(1 / (1 + exp(-z))), stable for large |z|.
double log_logistic(double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

// Observations compiled against a table of distinct payoffs so utilities are
// computed once per rho.
struct Compiled {
  std::vector<double> payoffs;
  struct Row {
    int fv, fnv, sv, snv;
    Relation rel;
  };
  std::vector<Row> rows;
  bool any_strict = false;

  explicit Compiled(const std::vector<Observation>& obs) {
    auto idx = [&](Money m) {
      double x = m.to_double();
      auto it = std::find(payoffs.begin(), payoffs.end(), x);
      if (it != payoffs.end()) return static_cast<int>(it - payoffs.begin());
      payoffs.push_back(x);
      return static_cast<int>(payoffs.size() - 1);
    };
    for (const auto& o : obs) {
      rows.push_back({idx(o.first.v), idx(o.first.nv), idx(o.second.v), idx(o.second.nv), o.relation});
      any_strict = any_strict || is_strict(o.relation);
    }
  }

  std::vector<double> differences(double rho, double pi) const {
    const auto u = UtilityFunction::crra(rho);
    std::vector<double> util(payoffs.size());
    for (std::size_t i = 0; i < payoffs.size(); ++i) util[i] = u(payoffs[i]);
    std::vector<double> d(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      d[i] = (pi * util[r.fv] + (1 - pi) * util[r.fnv]) - (pi * util[r.sv] + (1 - pi) * util[r.snv]);
    }
    return d;
  }

  double loglik(const std::vector<double>& d, double sigma) const {
    double ll = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double z = d[i] / sigma;
      switch (rows[i].rel) {
        case Relation::FirstPreferred: ll += log_logistic(z); break;
        case Relation::SecondPreferred: ll += log_logistic(-z); break;
        case Relation::Indifferent: ll += std::log(2.0) + log_logistic(z) + log_logistic(-z); break;
        case Relation::Incomparable: break;
      }
    }
    return ll;
  }
};

template <class F>
double golden_max(F&& f, double a, double b, double tol, double* best_value) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  const double x = fc >= fd ? c : d;
  if (best_value) *best_value = std::max(fc, fd);
  return x;
}

struct Profile {
  double sigma;
  double ll;
};

Profile profile_sigma(const Compiled& c, double rho, double pi, const MleOptions& opts, bool fixed) {
  const auto d = c.differences(rho, pi);
  if (fixed) return {opts.default_sigma, c.loglik(d, opts.default_sigma)};
  double ll = 0;
  const double ls = golden_max([&](double s) { return c.loglik(d, std::exp(s)); }, std::log(opts.sigma_lo),
                               std::log(opts.sigma_hi), 1e-7, &ll);
  // The interior search never evaluates the bracket ends; separable data push sigma to the floor.
  Profile best{std::exp(ls), ll};
  for (double s : {opts.sigma_lo, opts.sigma_hi}) {
    double v = c.loglik(d, s);
    if (v > best.ll) best = {s, v};
  }
  return best;
}

MleFit fit_at_belief(const Compiled& c, double pi, const MleOptions& opts) {
  const bool fixed = !c.any_strict;
  const int n = std::max(opts.rho_grid, 3);
  const double step = (opts.rho_hi - opts.rho_lo) / (n - 1);
  double best_rho = opts.rho_lo;
  Profile best{0, -std::numeric_limits<double>::infinity()};
  for (int k = 0; k < n; ++k) {
    const double rho = k == n - 1 ? opts.rho_hi : opts.rho_lo + step * k;
    Profile p = profile_sigma(c, rho, pi, opts, fixed);
    if (p.ll > best.ll) {
      best = p;
      best_rho = rho;
    }
  }
  const double a = std::max(opts.rho_lo, best_rho - step);
  const double b = std::min(opts.rho_hi, best_rho + step);
  double refined_ll = 0;
  const double refined =
      golden_max([&](double r) { return profile_sigma(c, r, pi, opts, fixed).ll; }, a, b, opts.rho_tolerance, &refined_ll);
  if (refined_ll > best.ll) {
    best_rho = refined;
    best = profile_sigma(c, refined, pi, opts, fixed);
  }
  return MleFit{best_rho, best.sigma, best.ll, pi, fixed};
}

bool observation_less(const Observation& x, const Observation& y) {
  auto key = [](const Observation& o) { return std::tuple(o.first, o.second, static_cast<int>(o.relation)); };
  return key(x) < key(y);
}

}  // namespace

double mle_log_likelihood(const std::vector<Observation>& obs, double rho, double sigma, Belief belief) {
  Compiled c(obs);
  return c.loglik(c.differences(rho, belief.pi), sigma);
}

MleFit fit_crra(std::vector<Observation> obs, Belief belief, const MleOptions& opts) {
  std::erase_if(obs, [](const Observation& o) { return o.relation == Relation::Incomparable; });
  if (obs.empty()) throw Error(ErrorCode::InvalidArgument, "MLE needs at least one ranked observation");
  std::sort(obs.begin(), obs.end(), observation_less);
  Compiled c(obs);
  if (!opts.joint_belief) return fit_at_belief(c, belief.pi, opts);
  MleFit best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  for (int pct = 0; pct <= 100; ++pct) {
    MleFit f = fit_at_belief(c, pct / 100.0, opts);
    if (f.log_likelihood > best.log_likelihood) best = f;
  }
  return best;
}

Lottery settle_mle(double rho, Belief belief) {
  const auto u = UtilityFunction::crra(rho);
  const double a = expected_utility(protocol::kMlePaymentFirst, belief, u);
  const double b = expected_utility(protocol::kMlePaymentSecond, belief, u);
  return a >= b ? protocol::kMlePaymentFirst : protocol::kMlePaymentSecond;
}

}  // namespace elicit
