#include "efb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "efb/kinf.hpp"
#include "efb/rng.hpp"

namespace efb {

namespace {

double clip01(double v) { return (v < 1.0) ? v : 1.0; }  // NaN/inf products clip to the trivial bound

double simpson(double (*f)(double, int), int K, double a, double b) {
  // adaptive Simpson on [a,b], absolute tolerance 1e-12
  struct Rec {
    static double run(double (*f)(double, int), int K, double a, double b, double fa, double fm,
                      double fb, double whole, double tol, int depth) {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm, K), frm = f(rm, K);
      const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
      if (depth > 40 || std::fabs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15.0;
      return run(f, K, a, m, fa, flm, fm, left, tol / 2, depth + 1) +
             run(f, K, m, b, fm, frm, fb, right, tol / 2, depth + 1);
    }
  };
  const double fa = f(a, K), fb = f(b, K), fm = f(0.5 * (a + b), K);
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  return Rec::run(f, K, a, b, fa, fm, fb, whole, 1e-12, 0);
}

double cos_pow(double phi, int Kp1) { return std::pow(std::cos(phi), Kp1); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> random_direction(int K, Rng& rng) {
  std::vector<double> v(K);
  double n2 = 0;
  do {
    n2 = 0;
    for (int k = 0; k < K; ++k) {
      v[k] = rng.normal();
      n2 += v[k] * v[k];
    }
  } while (n2 < 1e-12);
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& x : v) x *= inv;
  return v;
}

}  // namespace

double threshold_f(double x, double xi) {
  if (!(x > 1.0)) throw DomainError("threshold_f requires x > 1");
  return std::log(x) + xi * std::log(std::log(x));
}

double omega(double p, int K) {
  if (K < -1) throw DomainError("omega requires K >= -1");
  if (p < 0.0 || p > 1.0) throw DomainError("omega requires p in [0,1]");
  if (K == -1) return 1.0;
  // substitute z = sin(phi); integrand becomes cos(phi)^(K+1), smooth
  return simpson(&cos_pow, K + 1, std::asin(p), M_PI / 2.0);
}

ConeCover cone_cover(int K, double p, double eta, uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("cone_cover requires p in (0,1)");
  if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("cone_cover requires eta in [0,1)");
  ConeCover out;
  if (K == 1) {
    out.directions = {{1.0}, {-1.0}};
    out.count = 2;
    return out;
  }
  if (K == 2) {
    const int c = static_cast<int>(std::ceil(M_PI / std::acos(p)));
    for (int j = 0; j < c; ++j) {
      const double a = 2.0 * M_PI * j / c;
      out.directions.push_back({std::cos(a), std::sin(a)});
    }
    out.count = c;
    return out;
  }
  // K >= 3: greedy over sampled directions, then certify with fresh samples;
  // uncovered certificates are promoted to centers and certification reruns.
  const int n_samples = 100000;
  uint64_t stream = 0;
  {
    Rng rng(seed, stream++);
    for (int i = 0; i < n_samples; ++i) {
      auto d = random_direction(K, rng);
      bool covered = false;
      for (const auto& c : out.directions)
        if (dot(c, d) >= p) {
          covered = true;
          break;
        }
      if (!covered) out.directions.push_back(std::move(d));
    }
  }
  for (int round = 0; round < 20; ++round) {
    Rng rng(seed, stream++);
    bool clean = true;
    for (int i = 0; i < n_samples; ++i) {
      auto d = random_direction(K, rng);
      bool covered = false;
      for (const auto& c : out.directions)
        if (dot(c, d) >= p) {
          covered = true;
          break;
        }
      if (!covered) {
        out.directions.push_back(std::move(d));
        clean = false;
      }
    }
    if (clean) {
      out.count = static_cast<int>(out.directions.size());
      return out;
    }
  }
  throw CoverError("cone_cover: certification kept finding uncovered directions");
}

std::vector<NaturalParam> cover_base_points(const NaturalParam& theta_star, double rho_eps,
                                            double eta, const ConeCover& cover) {
  const double r = 0.5 * (1.0 + eta) * rho_eps;
  std::vector<NaturalParam> pts;
  pts.reserve(cover.directions.size());
  for (const auto& d : cover.directions) {
    std::vector<double> th(theta_star.theta);
    for (std::size_t k = 0; k < th.size(); ++k) th[k] -= r * d[k];
    pts.emplace_back(std::move(th));
  }
  return pts;
}

double constant_bigC(int K, double b, double v_rho, double V_rho, double rho, double p,
                     int cover_count) {
  if (!(b > 1.0)) throw DomainError("constant_bigC requires b > 1");
  if (!(v_rho > 0.0 && V_rho >= v_rho)) throw DomainError("invalid curvature bounds");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("constant_bigC requires p in (0,1)");
  const double wratio = omega(p, K - 2) / omega(std::max(p, 2.0 / std::sqrt(5.0)), K - 2);
  const double v6 = std::pow(v_rho, 6);
  const double e1 = 2.0 * b * std::pow(V_rho, 4) / (p * rho * rho * v6);
  const double e2 = std::pow(V_rho, 3) / std::pow(v_rho, 4);
  const double e3 = b * b * std::pow(V_rho, 5) / (p * v6 * (0.5 + 1.0 / K));
  const double mx = std::max({e1, e2, e3});
  return cover_count * (2.0 * wratio * std::pow(mx, K / 2.0) + 1.0);
}

double bigC_bernoulli_remark(double mu_rho) {
  if (!(mu_rho > 0.0 && mu_rho < 1.0)) throw DomainError("mu_rho outside (0,1)");
  const double g = mu_rho * (1.0 - mu_rho);
  return 2.0 * (1.0 / (8.0 * g * g * g) + 1.0);
}

double rho_epsilon(const FamilyModel& m, const NaturalParam& theta_star, double epsilon) {
  m.require_domain(theta_star);
  if (epsilon < 0) throw DomainError("epsilon must be nonnegative");
  if (epsilon == 0) return 0.0;
  const double target = mean_of(m, theta_star) - epsilon;
  switch (m.kind) {
    case FamilyKind::Bernoulli: {
      if (!(target > 0.0)) throw UnreachableMean("mu* - eps outside the achievable means");
      return std::fabs(theta_star[0] - bernoulli_theta(target));
    }
    case FamilyKind::GaussianMeanVar: {
      // level set is the half-line theta1 = -2 m theta2, theta2 < 0
      const double t1 = theta_star[0], t2 = theta_star[1];
      const double num = t2 - 2.0 * target * t1;
      const double t2p = num / (1.0 + 4.0 * target * target);
      if (t2p >= 0.0) return std::sqrt(t1 * t1 + t2 * t2);  // infimum at the boundary
      const double t1p = -2.0 * target * t2p;
      return std::hypot(t1 - t1p, t2 - t2p);
    }
    case FamilyKind::DiscreteAtoms: {
      if (!(target > m.atoms.front())) throw UnreachableMean("mu* - eps below the bottom atom");
      // minimize ||theta' - theta*|| on {mean = target}: stationarity
      // theta' - theta* = lam * grad mean(theta'), lam < 0, solved by
      // bisection on lam with an inner damped fixed-point/Newton iterate.
      const int K = m.K;
      const auto mean_grad = [&](const NaturalParam& t) {
        const auto g = grad_log_partition(m, t);
        const auto xf = moment_xf(m, t);
        const double ex = mean_of(m, t);
        std::vector<double> c(K);
        for (int k = 0; k < K; ++k) c[k] = xf[k] - ex * g[k];
        return c;
      };
      const auto solve = [&](double lam, NaturalParam t) {
        for (int it = 0; it < 200; ++it) {
          const auto c = mean_grad(t);
          double delta = 0.0;
          NaturalParam nt = t;
          for (int k = 0; k < K; ++k) {
            const double want = theta_star[k] + lam * c[k];
            delta = std::max(delta, std::fabs(want - t.theta[k]));
            nt.theta[k] = t.theta[k] + 0.5 * (want - t.theta[k]);  // damped
          }
          t = nt;
          if (delta < 1e-13) break;
        }
        return t;
      };
      double lo = -1e-6, hi = 0.0;
      NaturalParam warm = theta_star;
      for (int it = 0; it < 80; ++it) {
        warm = solve(lo, warm);
        if (mean_of(m, warm) <= target) break;
        hi = lo;
        lo *= 2.0;
        if (lo < -1e9) throw InversionError("rho_epsilon: failed to bracket");
      }
      NaturalParam t2 = warm;
      for (int it = 0; it < 120; ++it) {
        const double lam = 0.5 * (lo + hi);
        t2 = solve(lam, t2);
        if (mean_of(m, t2) <= target)
          lo = lam;
        else
          hi = lam;
      }
      double d2 = 0.0;
      for (int k = 0; k < K; ++k) {
        const double dk = t2.theta[k] - theta_star[k];
        d2 += dk * dk;
      }
      return std::sqrt(d2);
    }
  }
  throw DomainError("unknown family kind");
}

BoundConfig make_bound_config(const FamilyModel& m, const ParamRegion& region,
                              const NaturalParam& theta_star, double epsilon, double b, double p,
                              double q, double eta, double xi) {
  if (!(b > 1.0)) throw DomainError("b must exceed 1");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0,1)");
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("q must lie in (0,1]");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0,1)");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  BoundConfig cfg;
  cfg.region = region;
  cfg.epsilon = epsilon;
  cfg.b = b;
  cfg.p = p;
  cfg.q = q;
  cfg.eta = eta;
  cfg.xi = xi;
  cfg.K = m.K;
  cfg.rho_eps = rho_epsilon(m, theta_star, epsilon);
  cfg.alpha = eta * cfg.rho_eps * std::sqrt(region.v_rho / 2.0);
  cfg.chi_unit = p * eta * std::sqrt(2.0 * region.v_rho * region.v_rho / region.V_rho);
  cfg.chi_eps = cfg.rho_eps * cfg.chi_unit;
  cfg.cover_count = cone_cover(m.K, p, eta).count;
  cfg.big_C = constant_bigC(m.K, b, region.v_rho, region.V_rho, region.rho, p, cfg.cover_count);
  cfg.big_C4 = constant_bigC(m.K, 4.0, region.v_rho, region.V_rho, region.rho, p, cfg.cover_count);
  return cfg;
}

double theorem_main_bound(double t, const BoundConfig& cfg, BoundVariant variant) {
  if (!(t >= 2.0)) throw DomainError("theorem_main_bound requires t >= 2");
  const double xi = cfg.xi;

  const int I_t = std::max(1, static_cast<int>(std::ceil(std::log(cfg.q * t) / std::log(cfg.b))));
  std::vector<double> grid(I_t + 1);  // n_0..n_{I_t}
  for (int i = 0; i < I_t; ++i) grid[i] = std::pow(cfg.b, i);
  // the union runs to n = t for f(t); the f(t/n) variant stops at n = t-1 so
  // every threshold argument stays above 1 (matching the corollary unions)
  grid[I_t] = (variant == BoundVariant::f_of_t) ? t + 1.0 : t;

  if (variant == BoundVariant::f_of_t_over_n) {
    if (xi < 0) throw ValidityError("f(t/n) variant requires xi >= 0");
    // numeric precondition check over the evaluated integer range
    const auto fv = [&](double n) { return threshold_f(t / n, xi); };
    double prev_fn_over_n = 0, prev_n_fn = 0;
    bool first = true;
    const long n_max = static_cast<long>(grid[I_t] - 1.0);
    long step = 1;
    for (long n = 1; n <= n_max; n += step) {
      if (t / static_cast<double>(n) <= 1.0) throw DomainError("threshold argument <= 1");
      const double f = fv(static_cast<double>(n));
      const double a = f / n, bb = n * f;
      if (!first) {
        if (a > prev_fn_over_n + 1e-12)
          throw ValidityError("f(t/n)/n is not non-increasing over the range");
        if (bb < prev_n_fn - 1e-12)
          throw ValidityError("n f(t/n) is not non-decreasing over the range");
      }
      prev_fn_over_n = a;
      prev_n_fn = bb;
      first = false;
      if (n > 65536 && n < n_max - 65536) step = n / 1024;  // dense head+tail, sampled middle
      else step = 1;
    }
  } else {
    if (!(threshold_f(t, xi) >= 0)) throw DomainError("f(t) < 0; increase t or xi");
  }

  const double alpha2 = cfg.alpha * cfg.alpha;
  double sum = 0.0;
  for (int i = 0; i < I_t; ++i) {
    const double ni = grid[i];
    const double boundary = grid[i + 1] - 1.0;
    const double f_head = (variant == BoundVariant::f_of_t) ? threshold_f(t, xi)
                                                            : threshold_f(t / ni, xi);
    const double f_tail = (variant == BoundVariant::f_of_t) ? threshold_f(t, xi)
                                                            : threshold_f(t / boundary, xi);
    if (f_tail < 0) throw DomainError("threshold negative inside the sum");
    sum += std::exp(-ni * alpha2 - cfg.chi_eps * std::sqrt(ni * f_head) - f_tail) *
           std::pow(f_tail, cfg.K / 2.0);
  }
  return clip01(cfg.big_C * sum);
}

double cor1_bound(double t, const BoundConfig& cfg) {
  const double xi = cfg.xi;
  if (!(t > 1.0)) throw DomainError("cor1_bound requires t > 1");
  if (!(t >= std::exp(-xi))) throw ValidityError("cor1_bound requires t >= exp(-xi)");
  const double f = threshold_f(t, xi);
  if (!(f >= 1.0)) throw ValidityError("cor1_bound requires f(t) >= 1");
  const double lt = std::log(t);
  const double llt = std::log(lt);
  const double v = cfg.big_C4 * (1.0 + cfg.chi_eps) / (cfg.chi_eps * t) *
                   std::pow(1.0 + xi * llt / lt, cfg.K / 2.0) * std::pow(lt, cfg.K / 2.0 - xi) *
                   std::exp(-cfg.chi_eps * std::sqrt(f));
  return clip01(v);
}

double t_chi_exact(double chi_eps) {
  if (!(chi_eps > 0)) throw DomainError("chi_eps must be positive");
  const double rhs = std::log(4.5) / chi_eps;
  const auto g = [](double logt) {
    return 2.0 * std::sqrt(logt - std::log(4.0)) - std::sqrt(logt);
  };
  double lo = std::log(4.0) + 1e-9, hi = 4e3;
  if (g(hi) < rhs) return std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) >= rhs)
      hi = mid;
    else
      lo = mid;
  }
  return std::exp(hi);
}

double t_chi_closed_form(double chi_eps) {
  if (!(chi_eps > 0)) throw DomainError("chi_eps must be positive");
  const double l2 = std::log(4.5) * std::log(4.5);
  return std::exp(l2 / (chi_eps * chi_eps)) / (chi_eps * chi_eps * 4.0 * l2);
}

Cor2Result cor2_bound(double t, const BoundConfig& cfg) {
  const double xi = cfg.xi;
  const int K = cfg.K;
  if (xi < std::max(K / 2.0 - 1.0, 0.0))
    throw ValidityError("cor2_bound requires xi >= max(K/2 - 1, 0)");
  const double chi = cfg.chi_eps;
  const double c = chi * chi / std::pow(2.0 * std::log(5.0), 2);
  const double t_lo = 85.0 / (chi * chi);
  Cor2Result res;
  if (t < t_lo || t * c <= 1.0) {
    res.value = 1.0;
    res.window = Cor2Window::below_range;
    return res;
  }
  const double cprime = (xi >= K / 2.0) ? std::sqrt(threshold_f(5.0, xi) / 5.0)
                                        : std::sqrt(threshold_f(4.0, xi) / 4.0);
  const double ltc = std::log(t * c);
  const double first = std::exp(-chi * std::sqrt(t) * cprime);
  const double tchi = t_chi_exact(chi);
  double bracket;
  if (t < tchi) {
    res.window = Cor2Window::mid_range;
    if (xi >= K / 2.0) {
      bracket = (16.0 / 3.0) * std::pow(std::log(t * c * ltc / 4.0), K / 2.0 - xi) +
                80.0 * std::pow(std::log(1.25), K / 2.0 - xi);
    } else {
      const double den = 4.0 - c * ltc;
      if (!(den > 0)) throw DomainError("cor2_bound: intermediate log undefined");
      bracket = (16.0 / 3.0) * std::pow(std::log(t / 3.0), K / 2.0 - xi) +
                80.0 * std::pow(std::log(t * c * ltc / den), K / 2.0 - xi);
    }
  } else {
    res.window = Cor2Window::high_range;
    bracket = (xi >= K / 2.0) ? 144.0 * std::pow(std::log(1.25), K / 2.0 - xi)
                              : 144.0 * std::pow(std::log(t / 3.0), K / 2.0 - xi);
  }
  const double second = std::pow(1.0 + xi, K / 2.0) * bracket / (c * t * ltc);
  res.value = clip01(cfg.big_C4 * (first + second));
  return res;
}

double prior_bound_cgmms(double t, double xi) {
  if (!(t > 1.0)) throw DomainError("prior_bound_cgmms requires t > 1");
  const double f = threshold_f(t, xi);
  if (!(f > 0.0)) return 1.0;  // vacuous outside the stated range
  const double v = M_E * std::ceil(f * std::log(t)) * std::exp(-f);
  return clip01(v);
}

double dim1_maximal_bound(int m_lo, int M_hi, double t, double xi) {
  if (!(1 <= m_lo && m_lo <= M_hi && M_hi <= t)) throw DomainError("need 1 <= m <= M <= t");
  if (!(t / M_hi > 1.0)) throw DomainError("need t/M > 1");
  // precondition: f(t/n)/n non-increasing over [m, M]
  double prev = std::numeric_limits<double>::infinity();
  for (int n = m_lo; n <= M_hi; ++n) {
    const double x = t / n;
    if (!(x > 1.0)) throw DomainError("threshold argument <= 1 inside [m, M]");
    const double v = threshold_f(x, xi) / n;
    if (v > prev + 1e-12) throw DomainError("f(t/n)/n not non-increasing over [m, M]");
    prev = v;
  }
  return std::exp(-(static_cast<double>(m_lo) / M_hi) * threshold_f(t / M_hi, xi));
}

double sanov_bound(const FamilyModel& m, const NaturalParam& th, double mu_threshold, double t) {
  if (!(t >= 1.0)) throw DomainError("sanov_bound requires t >= 1");
  const double lam = kinf(m, th, mu_threshold).value;
  return std::exp(-t * lam);
}

}  // namespace efb
