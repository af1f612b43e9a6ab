#pragma once
#include <cstdint>
#include <vector>

#include "efb/errors.hpp"
#include "efb/rng.hpp"

namespace efb {

enum class FamilyKind { Bernoulli, GaussianMeanVar, DiscreteAtoms };

// Natural (canonical) parameters theta. Gaussian convention:
// theta = (mu/sigma^2, -1/(2 sigma^2)), so theta[1] < 0 on the domain.
struct NaturalParam {
  std::vector<double> theta;
  NaturalParam() = default;
  explicit NaturalParam(std::vector<double> t) : theta(std::move(t)) {}
  NaturalParam(std::initializer_list<double> t) : theta(t) {}
  std::size_t dim() const { return theta.size(); }
  double operator[](std::size_t i) const { return theta[i]; }
};

// Expectation (dual) parameters: E[F(X)]. For Bernoulli this is the mean,
// for Gaussian (E X, E X^2), for DiscreteAtoms the probabilities of the
// K non-top atoms.
struct MeanParam {
  std::vector<double> f_mean;
  MeanParam() = default;
  explicit MeanParam(std::vector<double> f) : f_mean(std::move(f)) {}
  MeanParam(std::initializer_list<double> f) : f_mean(f) {}
  std::size_t dim() const { return f_mean.size(); }
  double operator[](std::size_t i) const { return f_mean[i]; }
};

using Matrix = std::vector<std::vector<double>>;  // dense KxK, K is small

// A K-dimensional exponential family on the real line. The three kinds are
// Bernoulli (K=1), Gaussian with unknown mean and variance (K=2) and
// distributions over a fixed finite set of atoms (K+1 atoms, the largest
// one x* plays the role of the reference cell).
struct FamilyModel {
  FamilyKind kind = FamilyKind::Bernoulli;
  int K = 1;
  std::vector<double> atoms;  // DiscreteAtoms only, strictly increasing

  static FamilyModel bernoulli();
  static FamilyModel gaussian_mean_var();
  static FamilyModel discrete(std::vector<double> atoms);

  bool in_domain(const NaturalParam& th) const;
  void require_domain(const NaturalParam& th) const;
  // Supremum of achievable means (x* for bounded kinds, +inf for Gaussian).
  double mu_plus() const;
};

double log_partition(const FamilyModel& m, const NaturalParam& th);
MeanParam grad_log_partition(const FamilyModel& m, const NaturalParam& th);
Matrix hessian_log_partition(const FamilyModel& m, const NaturalParam& th);

// B^psi(theta, theta2) = psi(theta2) - psi(theta) - <theta2 - theta, grad psi(theta)>,
// which equals KL(nu_theta, nu_theta2) inside the family.
double bregman(const FamilyModel& m, const NaturalParam& th, const NaturalParam& th2);

// Fenchel-Legendre dual of eta -> psi(theta_star + eta) - psi(theta_star),
// evaluated through the duality Phi*(grad psi(theta)) = B(theta, theta_star).
double fenchel_dual(const FamilyModel& m, const NaturalParam& theta_star, const MeanParam& f);

// Inverse of grad psi. Throws BoundaryError when f sits on or outside the
// realizable boundary (Bernoulli mean 0/1, Gaussian zero variance, empty
// discrete cells).
NaturalParam mean_to_natural(const FamilyModel& m, const MeanParam& f);

// E_theta[X] and E_theta[X F(X)] in closed form per kind.
double mean_of(const FamilyModel& m, const NaturalParam& th);
std::vector<double> moment_xf(const FamilyModel& m, const NaturalParam& th);

// One draw of F(X) under nu_theta.
std::vector<double> sample_stat(const FamilyModel& m, const NaturalParam& th, Rng& rng);

// Running averages F_hat_1..F_hat_n, deterministic given (seed, stream 0).
std::vector<MeanParam> sample_sufficient_stats(const FamilyModel& m, const NaturalParam& th,
                                               std::size_t n, uint64_t seed);

// Bernoulli natural parameter of a mean, log(mu/(1-mu)).
double bernoulli_theta(double mu);
// Binary KL kl(a,b) with the usual boundary conventions kl(0,b), kl(1,b).
double kl_bernoulli(double a, double b);
// KL(N(m0,v0), N(m1,v1)) in (mean, variance) coordinates.
double kl_gaussian(double m0, double v0, double m1, double v1);

}  // namespace efb
