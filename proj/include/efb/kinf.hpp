#pragma once
#include "efb/family.hpp"

namespace efb {

// Result of the projected divergence K_a(nu_theta, mu) = inf{ B(theta, theta')
// : E_{theta'} X >= mu }. `lambda` is the Lagrange multiplier of the mean
// constraint in the natural-parameter KKT system (the one kkt_residual uses).
struct KinfResult {
  double value = 0.0;
  NaturalParam minimizer;
  double lambda = 0.0;
  bool active = false;
};

// Dispatch: Bernoulli -> binary kl, Gaussian -> closed form with the
// constrained variance s^2 = sigma^2 + (mu - m)^2, DiscreteAtoms -> the
// one-dimensional dual. Throws UnreachableMean when mu >= sup achievable
// mean for bounded-support kinds.
KinfResult kinf(const FamilyModel& m, const NaturalParam& th, double mu);

// sup over lambda in [0,1] of sum_x p(x) log(1 - lambda (x-mu)/(xstar-mu)).
// `probs_all` spans all atoms (including x*), summing to 1. The returned
// KinfResult carries the natural-parameter minimizer and the Lagrange
// multiplier b = lambda_ht / (xstar - mu).
KinfResult kinf_discrete_dual(const std::vector<double>& probs_all,
                              const std::vector<double>& atoms, double mu);

// Generic constrained minimizer (bisection on the scalar dual multiplier,
// inner Newton solve of the stationarity equation). Used as a cross-check of
// the closed forms and the discrete dual.
KinfResult kinf_generic(const FamilyModel& m, const NaturalParam& th, double mu);

// Stacked residual of the stationarity system
//   grad psi(th2) (1 + lambda E_{th2} X) - grad psi(th) - lambda E_{th2}[X F(X)]
// plus the complementarity term lambda (mu - E_{th2} X); length K+1.
std::vector<double> kkt_residual(const FamilyModel& m, const NaturalParam& th,
                                 const NaturalParam& th2, double lambda, double mu);

}  // namespace efb
