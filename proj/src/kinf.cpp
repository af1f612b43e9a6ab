#include "efb/kinf.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace efb {

namespace {

KinfResult inactive_result(const FamilyModel& m, const NaturalParam& th) {
  KinfResult r;
  r.value = 0.0;
  r.minimizer = th;
  r.lambda = 0.0;
  r.active = false;
  return r;
}

// Cov(X, F(X)) = d/dtheta' E_{theta'} X
std::vector<double> mean_gradient(const FamilyModel& m, const NaturalParam& th) {
  const auto g = grad_log_partition(m, th);
  const auto xf = moment_xf(m, th);
  const double ex = mean_of(m, th);
  std::vector<double> c(m.K);
  for (int k = 0; k < m.K; ++k) c[k] = xf[k] - ex * g[k];
  return c;
}

}  // namespace

KinfResult kinf(const FamilyModel& m, const NaturalParam& th, double mu) {
  m.require_domain(th);
  if (mu >= m.mu_plus()) throw UnreachableMean("mu at or above the maximal achievable mean");
  if (mean_of(m, th) >= mu) return inactive_result(m, th);

  switch (m.kind) {
    case FamilyKind::Bernoulli: {
      const double muhat = mean_of(m, th);
      KinfResult r;
      r.value = kl_bernoulli(muhat, mu);
      r.minimizer = NaturalParam{{bernoulli_theta(mu)}};
      r.lambda = (mu - muhat) / (mu * (1.0 - mu));
      r.active = true;
      return r;
    }
    case FamilyKind::GaussianMeanVar: {
      const double var = -0.5 / th[1];
      const double m0 = th[0] * var;
      const double s2 = var + (mu - m0) * (mu - m0);  // minimizing variance
      KinfResult r;
      r.value = 0.5 * std::log(s2 / var);
      r.minimizer = NaturalParam{{mu / s2, -0.5 / s2}};
      r.lambda = (mu - m0) / s2;
      r.active = true;
      return r;
    }
    case FamilyKind::DiscreteAtoms: {
      const auto g = grad_log_partition(m, th);
      std::vector<double> p(m.K + 1);
      double s = 0.0;
      for (int k = 0; k < m.K; ++k) {
        p[k] = g[k];
        s += g[k];
      }
      p[m.K] = 1.0 - s;
      return kinf_discrete_dual(p, m.atoms, mu);
    }
  }
  throw DomainError("unknown family kind");
}

KinfResult kinf_discrete_dual(const std::vector<double>& probs_all,
                              const std::vector<double>& atoms, double mu) {
  const std::size_t n = atoms.size();
  if (probs_all.size() != n) throw DomainError("probs/atoms size mismatch");
  const double xstar = atoms.back();
  if (mu >= xstar) throw UnreachableMean("mu at or above the top atom");

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += probs_all[i] * atoms[i];
  if (mean >= mu) {
    KinfResult r;
    r.active = false;
    r.value = 0.0;
    r.lambda = 0.0;
    try {
      std::vector<double> head(probs_all.begin(), probs_all.end() - 1);
      r.minimizer = mean_to_natural(FamilyModel::discrete(atoms), MeanParam{head});
    } catch (const BoundaryError&) {
    }
    return r;
  }

  std::vector<double> ratio(n);
  for (std::size_t i = 0; i < n; ++i) ratio[i] = (atoms[i] - mu) / (xstar - mu);  // ratio[n-1] = 1

  const auto gval = [&](double lam) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (probs_all[i] > 0) v += probs_all[i] * std::log1p(-lam * ratio[i]);
    return v;
  };
  const auto gder = [&](double lam) {
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (probs_all[i] > 0) d -= probs_all[i] * ratio[i] / (1.0 - lam * ratio[i]);
    return d;
  };

  // concave in lambda; derivative positive at 0, decreasing
  double lo = 0.0, hi = 1.0 - 1e-12;
  double lam;
  if (gder(hi) >= 0) {
    lam = hi;  // top cell empty, supremum at the endpoint
  } else {
    for (int it = 0; it < 200; ++it) {
      lam = 0.5 * (lo + hi);
      const double d = gder(lam);
      if (d > 0)
        lo = lam;
      else
        hi = lam;
      if (hi - lo < 1e-16) break;
    }
    lam = 0.5 * (lo + hi);
  }

  KinfResult r;
  r.value = gval(lam);
  r.active = true;
  r.lambda = lam / (xstar - mu);
  // minimizer q(x) = p(x) / (1 - lam (x-mu)/(xstar-mu)), renormalized
  std::vector<double> q(n);
  double qs = 0.0;
  bool positive = true;
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = probs_all[i] / (1.0 - lam * ratio[i]);
    qs += q[i];
    positive = positive && q[i] > 0;
  }
  if (positive) {
    std::vector<double> head(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) head[i] = q[i] / qs;
    try {
      r.minimizer = mean_to_natural(FamilyModel::discrete(atoms), MeanParam{head});
    } catch (const BoundaryError&) {
    }
  }
  return r;
}

KinfResult kinf_generic(const FamilyModel& m, const NaturalParam& th, double mu) {
  m.require_domain(th);
  if (mu >= m.mu_plus()) throw UnreachableMean("mu at or above the maximal achievable mean");
  if (mean_of(m, th) >= mu) return inactive_result(m, th);
  const int K = m.K;

  const auto g0 = grad_log_partition(m, th);
  // stationarity residual grad psi(th2) - grad psi(th) - lam * c(th2)
  const auto residual = [&](const NaturalParam& t2, double lam) {
    const auto g = grad_log_partition(m, t2);
    const auto c = mean_gradient(m, t2);
    Eigen::VectorXd r(K);
    for (int k = 0; k < K; ++k) r(k) = g[k] - g0[k] - lam * c[k];
    return r;
  };
  // damped Newton for fixed lam; fails when no stationary point exists
  // (lam beyond the dual boundary, e.g. Gaussian lam > 1/(2 sigma))
  const auto solve_for_lambda = [&](double lam, NaturalParam t2, bool& converged) {
    converged = false;
    for (int it = 0; it < 100; ++it) {
      Eigen::VectorXd r = residual(t2, lam);
      if (r.norm() < 1e-11) {
        converged = true;
        break;
      }
      const auto h = hessian_log_partition(m, t2);
      Eigen::MatrixXd J(K, K);
      for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) J(i, j) = h[i][j];
      const double eps = 1e-6;
      for (int j = 0; j < K; ++j) {
        NaturalParam tp = t2, tm = t2;
        tp.theta[j] += eps;
        tm.theta[j] -= eps;
        if (!m.in_domain(tp) || !m.in_domain(tm)) continue;
        const auto cp = mean_gradient(m, tp);
        const auto cm = mean_gradient(m, tm);
        for (int i = 0; i < K; ++i) J(i, j) -= lam * (cp[i] - cm[i]) / (2 * eps);
      }
      Eigen::VectorXd step = J.fullPivLu().solve(r);
      double damp = 1.0;
      bool moved = false;
      for (int half = 0; half < 50; ++half) {
        NaturalParam cand = t2;
        for (int k = 0; k < K; ++k) cand.theta[k] -= damp * step(k);
        if (m.in_domain(cand) && residual(cand, lam).norm() < r.norm()) {
          t2 = cand;
          moved = true;
          break;
        }
        damp *= 0.5;
      }
      if (!moved) break;
    }
    return t2;
  };

  // Bisection on lam: "solved with mean < mu" raises lo, everything else
  // (mean reached, or no stationary point) caps hi.
  double lam_lo = 0.0, lam_hi = 1e-6;
  NaturalParam warm = th;
  for (int it = 0; it < 200; ++it) {
    bool conv = false;
    const NaturalParam cand = solve_for_lambda(lam_hi, warm, conv);
    if (!conv || mean_of(m, cand) >= mu) break;
    warm = cand;
    lam_lo = lam_hi;
    lam_hi *= 2.0;
    if (lam_hi > 1e12) throw InversionError("kinf_generic: failed to bracket the multiplier");
  }
  NaturalParam t2 = warm;
  double lam = lam_lo;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lam_lo + lam_hi);
    bool conv = false;
    const NaturalParam cand = solve_for_lambda(mid, t2, conv);
    if (conv && mean_of(m, cand) < mu) {
      lam_lo = mid;
      t2 = cand;
      lam = mid;
    } else {
      lam_hi = mid;
      if (conv) {
        t2 = cand;
        lam = mid;
      }
    }
  }

  // polish on the joint KKT system in (theta', lam)
  {
    Eigen::VectorXd z(K + 1);
    for (int k = 0; k < K; ++k) z(k) = t2.theta[k];
    z(K) = lam;
    const auto joint = [&](const Eigen::VectorXd& zz, NaturalParam& tt) -> Eigen::VectorXd {
      tt.theta.assign(zz.data(), zz.data() + K);
      Eigen::VectorXd F(K + 1);
      F.head(K) = residual(tt, zz(K));
      F(K) = mean_of(m, tt) - mu;
      return F;
    };
    NaturalParam tt = t2;
    for (int it = 0; it < 60; ++it) {
      if (!m.in_domain(NaturalParam{std::vector<double>(z.data(), z.data() + K)})) break;
      Eigen::VectorXd F = joint(z, tt);
      if (F.norm() < 1e-12) break;
      Eigen::MatrixXd J(K + 1, K + 1);
      const double eps = 1e-7;
      for (int j = 0; j <= K; ++j) {
        Eigen::VectorXd zp = z, zm = z;
        zp(j) += eps;
        zm(j) -= eps;
        NaturalParam tp = tt, tm = tt;
        if (!m.in_domain(NaturalParam{std::vector<double>(zp.data(), zp.data() + K)}) ||
            !m.in_domain(NaturalParam{std::vector<double>(zm.data(), zm.data() + K)}))
          continue;
        J.col(j) = (joint(zp, tp) - joint(zm, tm)) / (2 * eps);
      }
      const Eigen::VectorXd step = J.fullPivLu().solve(F);
      double damp = 1.0;
      bool moved = false;
      for (int half = 0; half < 50; ++half) {
        Eigen::VectorXd cand = z - damp * step;
        NaturalParam tc = tt;
        if (m.in_domain(NaturalParam{std::vector<double>(cand.data(), cand.data() + K)}) &&
            joint(cand, tc).norm() < F.norm()) {
          z = cand;
          moved = true;
          break;
        }
        damp *= 0.5;
      }
      if (!moved) break;
    }
    if (m.in_domain(NaturalParam{std::vector<double>(z.data(), z.data() + K)})) {
      t2.theta.assign(z.data(), z.data() + K);
      lam = z(K);
    }
  }

  KinfResult r;
  r.value = bregman(m, th, t2);
  r.minimizer = t2;
  r.lambda = lam;
  r.active = true;
  return r;
}

std::vector<double> kkt_residual(const FamilyModel& m, const NaturalParam& th,
                                 const NaturalParam& th2, double lambda, double mu) {
  m.require_domain(th);
  m.require_domain(th2);
  if (lambda < 0) throw DomainError("lambda must be nonnegative");
  const auto g = grad_log_partition(m, th);
  const auto g2 = grad_log_partition(m, th2);
  const auto xf = moment_xf(m, th2);
  const double ex = mean_of(m, th2);
  std::vector<double> res(m.K + 1);
  for (int k = 0; k < m.K; ++k) res[k] = g2[k] * (1.0 + lambda * ex) - g[k] - lambda * xf[k];
  res[m.K] = lambda * (mu - ex);
  return res;
}

}  // namespace efb
