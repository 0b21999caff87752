#pragma once

#include <optional>
#include <vector>

#include "elicit/model.hpp"
#include "elicit/money.hpp"

namespace elicit {

/// A stated ranking of `first` against `second`. Only strict and Indifferent
/// rankings are observations; Incomparable answers never enter the fit.
struct Observation {
  Lottery first;
  Lottery second;
  Relation relation;

  bool operator==(const Observation&) const = default;
};

struct MleOptions {
  double rho_lo = -1.0;
  double rho_hi = 3.0;
  int rho_grid = 401;
  double sigma_lo = 1e-3;
  double sigma_hi = 2.0;
  /// Noise scale used when no strict ranking identifies it.
  double default_sigma = 0.5;
  double rho_tolerance = 1e-5;
  /// Estimate the prior jointly with rho on a percent grid.
  bool joint_belief = false;
};

struct MleFit {
  double rho = 0.0;
  double sigma = 0.0;
  double log_likelihood = 0.0;
  double belief = 0.5;  // prior used (or estimated, with joint_belief)
  bool sigma_fixed = false;
};

/// Accumulated choice data for the MLE payment rule.
class MleState {
 public:
  /// Incomparable rankings are ignored.
  void add(const Observation& o);
  const std::vector<Observation>& observations() const { return observations_; }

  std::optional<MleFit> fit;

 private:
  std::vector<Observation> observations_;
};

/// Logit log-likelihood: P(first over second) = 1 / (1 + exp(-dEU / sigma)),
/// and a stated indifference contributes 2 * L * (1 - L).
double mle_log_likelihood(const std::vector<Observation>& obs, double rho, double sigma, Belief belief);

/// Maximises the likelihood over (rho, sigma): a rho grid locates the best
/// bracket, golden-section search refines rho inside it, and sigma is profiled
/// out at every rho by golden-section search on log sigma (the likelihood is
/// concave in 1 / sigma). Observations are put in canonical order first, so
/// the result does not depend on their order. Throws Error(InvalidArgument)
/// when `obs` is empty.
MleFit fit_crra(std::vector<Observation> obs, Belief belief, const MleOptions& opts = {});

/// Pays (14, 2) when its EU under CRRA(rho) at `belief` is at least that of (9, 5).
Lottery settle_mle(double rho, Belief belief);

}  // namespace elicit
