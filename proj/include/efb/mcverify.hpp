#pragma once
#include <functional>
#include <optional>

#include "efb/bounds.hpp"
#include "efb/family.hpp"
#include "efb/region.hpp"

namespace efb {

// The boundary-crossing event of the main theorem: some n <= t has
// theta_hat_n in Theta_rho (when restricted) and
// Kinf(Pi(nu_hat_n), mu* - eps) >= f(.)/n. For the f(t/n) variant the union
// runs over n < t only, so every threshold argument stays above 1.
struct CrossingSpec {
  FamilyModel model;
  NaturalParam theta_star;
  double epsilon = 0.0;
  ParamRegion region;
  int t = 0;
  double xi = 0.0;
  BoundVariant variant = BoundVariant::f_of_t;
  bool restrict_to_region = true;
};

struct CrossingEstimate {
  double p_hat = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  // Wilson 95%
  uint64_t n_runs = 0;
  double envelope = 1.0;               // theoretical bound it is compared to
  std::optional<double> exact;         // DP value when available
};

CrossingEstimate estimate_crossing(const CrossingSpec& spec, uint64_t n_runs, uint64_t seed,
                                   int threads = 1);

// Exact crossing probability for Bernoulli by dynamic programming over
// (n, #successes), propagating not-yet-crossed mass with binomial
// transitions. Probabilities accumulate for both the n < t and n <= t unions;
// `strict_union` selects which one is returned.
double exact_crossing_bernoulli(const CrossingSpec& spec, bool strict_union = false);

// DP over an arbitrary per-state predicate; the building block for the
// crossing DP and the dimension-1 lemma checks.
double exact_crossing_bernoulli_dp(double mu_star, int t,
                                   const std::function<bool(int n, int successes)>& crossed);

struct EnvelopeReport {
  bool pass = false;
  double ratio = 0.0;  // bound / p_hat (infinity when p_hat == 0)
};
EnvelopeReport compare_to_envelope(const CrossingEstimate& est, double bound_value);

// Wilson 95% interval helper (exposed for tests).
void wilson_interval(uint64_t hits, uint64_t n, double& lo, double& hi);

}  // namespace efb
