#include "efb/mcverify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "efb/kinf.hpp"

namespace efb {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// per-n threshold f(.)/n, or +inf when the argument is out of range
// (f(t/n) at n = t); the n <= t union then ignores that n.
double threshold_at(const CrossingSpec& spec, int n) {
  const double t = static_cast<double>(spec.t);
  if (spec.variant == BoundVariant::f_of_t) return threshold_f(t, spec.xi) / n;
  const double x = t / n;
  if (x <= 1.0) return kInf;
  return threshold_f(x, spec.xi) / n;
}

// Kinf value of the empirical stat against mu* - eps, with the boundary
// conventions of the estimator path: undefined projections count as
// non-crossing under the region restriction and use limiting divergences
// otherwise (bounded families only).
double kinf_or_flag(const CrossingSpec& spec, const std::vector<double>& stat, int n,
                    double target, bool& theta_defined, bool& in_region) {
  const FamilyModel& m = spec.model;
  theta_defined = false;
  in_region = false;
  try {
    const NaturalParam th = mean_to_natural(m, MeanParam{stat});
    theta_defined = true;
    in_region = spec.region.contains(th);
    return kinf(m, th, target).value;
  } catch (const BoundaryError&) {
    // limiting divergence for bounded kinds
    if (m.kind == FamilyKind::Bernoulli) {
      const double muhat = stat[0];
      if (muhat >= target) return 0.0;
      return kl_bernoulli(muhat, target);
    }
    if (m.kind == FamilyKind::DiscreteAtoms) {
      std::vector<double> p(m.K + 1);
      double s = 0.0, mean = 0.0;
      for (int k = 0; k < m.K; ++k) {
        p[k] = stat[k];
        s += p[k];
        mean += p[k] * m.atoms[k];
      }
      p[m.K] = std::max(0.0, 1.0 - s);
      mean += p[m.K] * m.atoms.back();
      if (mean >= target) return 0.0;
      return kinf_discrete_dual(p, m.atoms, target).value;
    }
    return 0.0;  // Gaussian with undefined variance: no crossing evidence
  }
}

}  // namespace

void wilson_interval(uint64_t hits, uint64_t n, double& lo, double& hi) {
  const double z = 1.959963984540054;
  const double z2 = z * z;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  lo = (hits == 0) ? 0.0 : std::max(0.0, center - half);
  hi = (hits == n) ? 1.0 : std::min(1.0, center + half);
}

CrossingEstimate estimate_crossing(const CrossingSpec& spec, uint64_t n_runs, uint64_t seed,
                                   int threads) {
  if (n_runs < 100) throw ConfigError("estimate_crossing needs n_runs >= 100");
  if (spec.t < 2) throw ConfigError("estimate_crossing needs t >= 2");
  spec.model.require_domain(spec.theta_star);
  const double target = mean_of(spec.model, spec.theta_star) - spec.epsilon;
  const int K = spec.model.K;

  // thresholds depend on n only
  std::vector<double> thr(spec.t + 1, kInf);
  for (int n = 1; n <= spec.t; ++n) thr[n] = threshold_at(spec, n);

  const auto one_run = [&](uint64_t stream) -> bool {
    Rng rng(seed, stream);
    std::vector<double> acc(K, 0.0), stat(K, 0.0);
    for (int n = 1; n <= spec.t; ++n) {
      const auto f = sample_stat(spec.model, spec.theta_star, rng);
      for (int k = 0; k < K; ++k) {
        acc[k] += f[k];
        stat[k] = acc[k] / n;
      }
      if (std::isinf(thr[n])) continue;
      bool defined = false, inside = false;
      const double v = kinf_or_flag(spec, stat, n, target, defined, inside);
      if (spec.restrict_to_region) {
        if (defined && inside && v >= thr[n]) return true;
      } else if (v >= thr[n]) {
        return true;
      }
    }
    return false;
  };

  std::atomic<uint64_t> hits{0};
  threads = std::max(1, threads);
  if (threads == 1) {
    uint64_t h = 0;
    for (uint64_t i = 0; i < n_runs; ++i) h += one_run(i) ? 1 : 0;
    hits = h;
  } else {
    std::atomic<uint64_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        uint64_t local = 0;
        for (uint64_t i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1))
          local += one_run(i) ? 1 : 0;
        hits.fetch_add(local);
      });
    for (auto& th : pool) th.join();
  }

  CrossingEstimate est;
  est.n_runs = n_runs;
  est.p_hat = static_cast<double>(hits.load()) / static_cast<double>(n_runs);
  wilson_interval(hits.load(), n_runs, est.ci_low, est.ci_high);
  return est;
}

double exact_crossing_bernoulli_dp(double mu_star, int t,
                                   const std::function<bool(int, int)>& crossed) {
  if (t > 2000) throw SizeError("exact DP limited to t <= 2000");
  if (t < 1) throw ConfigError("t must be >= 1");
  // alive[s] = P(S_n = s, no crossing at any m <= n)
  std::vector<double> alive(t + 1, 0.0), next(t + 1, 0.0);
  alive[0] = 1.0;
  double crossed_mass = 0.0;
  for (int n = 1; n <= t; ++n) {
    std::fill(next.begin(), next.begin() + n + 1, 0.0);
    for (int s = 0; s < n; ++s) {
      const double mass = alive[s];
      if (mass == 0.0) continue;
      next[s] += mass * (1.0 - mu_star);
      next[s + 1] += mass * mu_star;
    }
    for (int s = 0; s <= n; ++s) {
      if (next[s] != 0.0 && crossed(n, s)) {
        crossed_mass += next[s];
        next[s] = 0.0;
      }
    }
    std::swap(alive, next);
  }
  return crossed_mass;
}

double exact_crossing_bernoulli(const CrossingSpec& spec, bool strict_union) {
  if (spec.model.kind != FamilyKind::Bernoulli)
    throw ConfigError("exact DP available for Bernoulli only");
  spec.model.require_domain(spec.theta_star);
  const double mu_star = mean_of(spec.model, spec.theta_star);
  const double target = mu_star - spec.epsilon;
  const int t_union = strict_union ? spec.t - 1 : spec.t;

  std::vector<double> thr(spec.t + 1, kInf);
  for (int n = 1; n <= t_union; ++n) thr[n] = threshold_at(spec, n);

  const auto crossed = [&](int n, int s) -> bool {
    if (n > t_union || std::isinf(thr[n])) return false;
    const double muhat = static_cast<double>(s) / n;
    const bool defined = (s > 0 && s < n);
    if (spec.restrict_to_region) {
      if (!defined) return false;
      if (!spec.region.contains(NaturalParam{{bernoulli_theta(muhat)}})) return false;
    }
    const double v = (muhat >= target) ? 0.0 : kl_bernoulli(muhat, target);
    return v >= thr[n];
  };
  return exact_crossing_bernoulli_dp(mu_star, spec.t, crossed);
}

EnvelopeReport compare_to_envelope(const CrossingEstimate& est, double bound_value) {
  EnvelopeReport rep;
  rep.pass = est.ci_low <= bound_value;
  rep.ratio = est.p_hat > 0 ? bound_value / est.p_hat : kInf;
  return rep;
}

}  // namespace efb
