#include "efb/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace efb {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + e^t) without overflow
double log1pexp(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

struct GaussMoments {
  double m, var;
};
GaussMoments gauss_moments(const NaturalParam& th) {
  const double var = -1.0 / (2.0 * th[1]);
  return {th[0] * var, var};
}

// probabilities (p_1..p_K, p_star) for the discrete kind
std::vector<double> discrete_probs(const FamilyModel& m, const NaturalParam& th) {
  const int K = m.K;
  double mx = 0.0;  // logsumexp over {theta_1..theta_K, 0}
  for (int k = 0; k < K; ++k) mx = std::max(mx, th[k]);
  double s = std::exp(-mx);
  for (int k = 0; k < K; ++k) s += std::exp(th[k] - mx);
  const double psi = mx + std::log(s);
  std::vector<double> p(K + 1);
  for (int k = 0; k < K; ++k) p[k] = std::exp(th[k] - psi);
  p[K] = std::exp(-psi);
  return p;
}
}  // namespace

FamilyModel FamilyModel::bernoulli() {
  FamilyModel m;
  m.kind = FamilyKind::Bernoulli;
  m.K = 1;
  return m;
}

FamilyModel FamilyModel::gaussian_mean_var() {
  FamilyModel m;
  m.kind = FamilyKind::GaussianMeanVar;
  m.K = 2;
  return m;
}

FamilyModel FamilyModel::discrete(std::vector<double> atoms) {
  if (atoms.size() < 2) throw ConfigError("discrete family needs >= 2 atoms");
  if (!std::is_sorted(atoms.begin(), atoms.end()))
    throw ConfigError("atoms must be strictly increasing");
  for (std::size_t i = 1; i < atoms.size(); ++i)
    if (atoms[i] <= atoms[i - 1]) throw ConfigError("atoms must be distinct");
  FamilyModel m;
  m.kind = FamilyKind::DiscreteAtoms;
  m.K = static_cast<int>(atoms.size()) - 1;
  m.atoms = std::move(atoms);
  return m;
}

bool FamilyModel::in_domain(const NaturalParam& th) const {
  if (static_cast<int>(th.dim()) != K) return false;
  for (double v : th.theta)
    if (!std::isfinite(v)) return false;
  if (kind == FamilyKind::GaussianMeanVar && !(th[1] < 0)) return false;
  return true;
}

void FamilyModel::require_domain(const NaturalParam& th) const {
  if (!in_domain(th)) throw DomainError("natural parameter outside Theta_D");
}

double FamilyModel::mu_plus() const {
  switch (kind) {
    case FamilyKind::Bernoulli: return 1.0;
    case FamilyKind::GaussianMeanVar: return kInf;
    case FamilyKind::DiscreteAtoms: return atoms.back();
  }
  return kInf;
}

double log_partition(const FamilyModel& m, const NaturalParam& th) {
  m.require_domain(th);
  switch (m.kind) {
    case FamilyKind::Bernoulli: return log1pexp(th[0]);
    case FamilyKind::GaussianMeanVar:
      return -th[0] * th[0] / (4.0 * th[1]) + 0.5 * std::log(-M_PI / th[1]);
    case FamilyKind::DiscreteAtoms: {
      double mx = 0.0;
      for (int k = 0; k < m.K; ++k) mx = std::max(mx, th[k]);
      double s = std::exp(-mx);
      for (int k = 0; k < m.K; ++k) s += std::exp(th[k] - mx);
      return mx + std::log(s);
    }
  }
  throw DomainError("unknown family kind");
}

MeanParam grad_log_partition(const FamilyModel& m, const NaturalParam& th) {
  m.require_domain(th);
  switch (m.kind) {
    case FamilyKind::Bernoulli: return MeanParam{{sigmoid(th[0])}};
    case FamilyKind::GaussianMeanVar: {
      const auto [mu, var] = gauss_moments(th);
      return MeanParam{{mu, mu * mu + var}};
    }
    case FamilyKind::DiscreteAtoms: {
      auto p = discrete_probs(m, th);
      p.pop_back();
      return MeanParam{std::move(p)};
    }
  }
  throw DomainError("unknown family kind");
}

Matrix hessian_log_partition(const FamilyModel& m, const NaturalParam& th) {
  m.require_domain(th);
  switch (m.kind) {
    case FamilyKind::Bernoulli: {
      const double mu = sigmoid(th[0]);
      return {{mu * (1.0 - mu)}};
    }
    case FamilyKind::GaussianMeanVar: {
      const auto [mu, var] = gauss_moments(th);
      // covariance of (X, X^2) under N(mu, var)
      return {{var, 2.0 * mu * var}, {2.0 * mu * var, 4.0 * mu * mu * var + 2.0 * var * var}};
    }
    case FamilyKind::DiscreteAtoms: {
      const auto p = discrete_probs(m, th);
      Matrix h(m.K, std::vector<double>(m.K));
      for (int i = 0; i < m.K; ++i)
        for (int j = 0; j < m.K; ++j) h[i][j] = (i == j ? p[i] : 0.0) - p[i] * p[j];
      return h;
    }
  }
  throw DomainError("unknown family kind");
}

double bregman(const FamilyModel& m, const NaturalParam& th, const NaturalParam& th2) {
  m.require_domain(th);
  m.require_domain(th2);
  const MeanParam g = grad_log_partition(m, th);
  double dot = 0.0;
  for (int k = 0; k < m.K; ++k) dot += (th2[k] - th[k]) * g[k];
  return log_partition(m, th2) - log_partition(m, th) - dot;
}

double fenchel_dual(const FamilyModel& m, const NaturalParam& theta_star, const MeanParam& f) {
  NaturalParam th;
  try {
    th = mean_to_natural(m, f);
  } catch (const BoundaryError& e) {
    throw InversionError(e.what());
  }
  return bregman(m, th, theta_star);
}

NaturalParam mean_to_natural(const FamilyModel& m, const MeanParam& f) {
  if (static_cast<int>(f.dim()) != m.K) throw DomainError("mean parameter has wrong dimension");
  switch (m.kind) {
    case FamilyKind::Bernoulli: {
      const double mu = f[0];
      if (!(mu > 0.0 && mu < 1.0)) throw BoundaryError("Bernoulli mean outside (0,1)");
      return NaturalParam{{bernoulli_theta(mu)}};
    }
    case FamilyKind::GaussianMeanVar: {
      const double mu = f[0], ex2 = f[1];
      const double var = ex2 - mu * mu;
      if (!(var > 0.0)) throw BoundaryError("Gaussian second moment implies variance <= 0");
      return NaturalParam{{mu / var, -0.5 / var}};
    }
    case FamilyKind::DiscreteAtoms: {
      double sum = 0.0;
      for (int k = 0; k < m.K; ++k) {
        if (!(f[k] > 0.0)) throw BoundaryError("discrete cell probability not positive");
        sum += f[k];
      }
      const double pstar = 1.0 - sum;
      if (!(pstar > 0.0)) throw BoundaryError("top-atom probability not positive");
      std::vector<double> th(m.K);
      for (int k = 0; k < m.K; ++k) th[k] = std::log(f[k] / pstar);
      return NaturalParam{std::move(th)};
    }
  }
  throw DomainError("unknown family kind");
}

double mean_of(const FamilyModel& m, const NaturalParam& th) {
  switch (m.kind) {
    case FamilyKind::Bernoulli: return sigmoid(th[0]);
    case FamilyKind::GaussianMeanVar: return gauss_moments(th).m;
    case FamilyKind::DiscreteAtoms: {
      const auto p = discrete_probs(m, th);
      double mu = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) mu += p[i] * m.atoms[i];
      return mu;
    }
  }
  throw DomainError("unknown family kind");
}

std::vector<double> moment_xf(const FamilyModel& m, const NaturalParam& th) {
  m.require_domain(th);
  switch (m.kind) {
    case FamilyKind::Bernoulli: return {sigmoid(th[0])};  // E[X*X] = mu on {0,1}
    case FamilyKind::GaussianMeanVar: {
      const auto [mu, var] = gauss_moments(th);
      // (E X^2, E X^3)
      return {mu * mu + var, mu * mu * mu + 3.0 * mu * var};
    }
    case FamilyKind::DiscreteAtoms: {
      const auto p = discrete_probs(m, th);
      std::vector<double> out(m.K);
      for (int k = 0; k < m.K; ++k) out[k] = m.atoms[k] * p[k];
      return out;
    }
  }
  throw DomainError("unknown family kind");
}

std::vector<double> sample_stat(const FamilyModel& m, const NaturalParam& th, Rng& rng) {
  switch (m.kind) {
    case FamilyKind::Bernoulli: {
      const double mu = sigmoid(th[0]);
      return {rng.uniform() < mu ? 1.0 : 0.0};
    }
    case FamilyKind::GaussianMeanVar: {
      const auto [mu, var] = gauss_moments(th);
      const double x = mu + std::sqrt(var) * rng.normal();
      return {x, x * x};
    }
    case FamilyKind::DiscreteAtoms: {
      const auto p = discrete_probs(m, th);
      double u = rng.uniform();
      std::size_t idx = p.size() - 1;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (u < p[i]) {
          idx = i;
          break;
        }
        u -= p[i];
      }
      std::vector<double> f(m.K, 0.0);
      if (static_cast<int>(idx) < m.K) f[idx] = 1.0;
      return f;
    }
  }
  throw DomainError("unknown family kind");
}

std::vector<MeanParam> sample_sufficient_stats(const FamilyModel& m, const NaturalParam& th,
                                               std::size_t n, uint64_t seed) {
  m.require_domain(th);
  if (n < 1) throw ConfigError("n must be >= 1");
  Rng rng(seed, 0);
  std::vector<MeanParam> out;
  out.reserve(n);
  std::vector<double> acc(m.K, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto f = sample_stat(m, th, rng);
    std::vector<double> avg(m.K);
    for (int k = 0; k < m.K; ++k) {
      acc[k] += f[k];
      avg[k] = acc[k] / static_cast<double>(i);
    }
    out.emplace_back(std::move(avg));
  }
  return out;
}

double bernoulli_theta(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw BoundaryError("mean outside (0,1)");
  return std::log(mu / (1.0 - mu));
}

double kl_bernoulli(double a, double b) {
  if (!(b > 0.0 && b < 1.0)) throw DomainError("kl_bernoulli: second argument outside (0,1)");
  if (a < 0.0 || a > 1.0) throw DomainError("kl_bernoulli: first argument outside [0,1]");
  if (a == 0.0) return -std::log1p(-b);
  if (a == 1.0) return -std::log(b);
  return a * std::log(a / b) + (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
}

double kl_gaussian(double m0, double v0, double m1, double v1) {
  if (!(v0 > 0.0 && v1 > 0.0)) throw DomainError("kl_gaussian: variances must be positive");
  return 0.5 * (std::log(v1 / v0) + (v0 + (m0 - m1) * (m0 - m1)) / v1 - 1.0);
}

}  // namespace efb
