#include "efb/bandit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "efb/bounds.hpp"
#include "efb/kinf.hpp"

namespace efb {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Kinf value straight from an empirical sufficient statistic, with the
// boundary conventions the index needs (lower-boundary means keep their
// limiting divergence, upper-boundary means have divergence 0 past mu).
double kinf_value_from_stat(const FamilyModel& m, const std::vector<double>& stat,
                            uint64_t n_pulls, double mu) {
  switch (m.kind) {
    case FamilyKind::Bernoulli: {
      const double muhat = stat[0];
      if (muhat >= mu) return 0.0;
      return kl_bernoulli(muhat, mu);
    }
    case FamilyKind::GaussianMeanVar: {
      const double mhat = stat[0];
      if (mhat >= mu) return 0.0;
      const double var = stat[1] - mhat * mhat;
      if (!(var > 0.0) || n_pulls < 2) return 0.0;  // undefined projection: no evidence
      return 0.5 * std::log1p((mu - mhat) * (mu - mhat) / var);
    }
    case FamilyKind::DiscreteAtoms: {
      std::vector<double> p(m.K + 1);
      double s = 0.0;
      for (int k = 0; k < m.K; ++k) {
        p[k] = stat[k];
        s += stat[k];
      }
      p[m.K] = std::max(0.0, 1.0 - s);
      double mean = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) mean += p[i] * m.atoms[i];
      if (mean >= mu) return 0.0;
      return kinf_discrete_dual(p, m.atoms, mu).value;
    }
  }
  throw DomainError("unknown family kind");
}
}  // namespace

BanditInstance make_instance(std::vector<std::pair<FamilyModel, NaturalParam>> arms) {
  if (arms.size() < 2) throw ConfigError("bandit instance needs >= 2 arms");
  BanditInstance inst;
  for (auto& [m, th] : arms) {
    m.require_domain(th);
    inst.means.push_back(mean_of(m, th));
    inst.models.push_back(std::move(m));
    inst.params.push_back(std::move(th));
  }
  inst.best_arm = 0;
  for (std::size_t a = 1; a < inst.means.size(); ++a)
    if (inst.means[a] > inst.means[inst.best_arm]) inst.best_arm = static_cast<int>(a);
  inst.mu_star = inst.means[inst.best_arm];
  for (double mu : inst.means) inst.gaps.push_back(inst.mu_star - mu);
  return inst;
}

double ucb_index(const FamilyModel& m, const MeanParam& emp, uint64_t n_pulls, double budget) {
  if (n_pulls < 1) throw DomainError("ucb_index requires n_pulls >= 1");
  if (budget < 0) budget = 0.0;
  const double mu_plus = m.mu_plus();
  if (std::isinf(budget)) return mu_plus;

  switch (m.kind) {
    case FamilyKind::Bernoulli: {
      const double muhat = emp[0];
      if (muhat >= 1.0) return 1.0;
      if (budget == 0.0) return muhat;
      double lo = muhat, hi = 1.0 - 1e-15;
      if (kl_bernoulli(muhat, hi) <= budget) return 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (kl_bernoulli(muhat, mid) <= budget)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    case FamilyKind::GaussianMeanVar: {
      const double mhat = emp[0];
      const double var = emp[1] - mhat * mhat;
      if (!(var > 0.0)) return mu_plus;  // degenerate empirical stat: optimism
      if (budget == 0.0) return mhat;
      if (budget > 300.0) return mu_plus;
      const double hi0 = mhat + std::sqrt(var * std::expm1(2.0 * budget)) + 1e-9;
      double lo = mhat, hi = hi0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = 0.5 * std::log1p((mid - mhat) * (mid - mhat) / var);
        if (v <= budget)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    case FamilyKind::DiscreteAtoms: {
      const double xstar = m.atoms.back();
      std::vector<double> p(m.K + 1);
      double s = 0.0, mean = 0.0;
      for (int k = 0; k < m.K; ++k) {
        p[k] = emp[k];
        s += p[k];
        mean += p[k] * m.atoms[k];
      }
      p[m.K] = std::max(0.0, 1.0 - s);
      mean += p[m.K] * xstar;
      if (mean >= xstar - 1e-15) return xstar;
      if (budget == 0.0) return mean;
      double lo = mean, hi = xstar - 1e-12;
      if (kinf_discrete_dual(p, m.atoms, hi).value <= budget) return xstar;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (kinf_discrete_dual(p, m.atoms, mid).value <= budget)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  throw DomainError("unknown family kind");
}

EpisodeRecord run_episode(const BanditInstance& inst, Strategy strategy, double xi, int T,
                          uint64_t seed, uint64_t stream, double epsilon) {
  const int A = static_cast<int>(inst.models.size());
  if (T < A) throw ConfigError("horizon shorter than the number of arms");
  if (epsilon < 0) {
    double min_gap = kInf;
    for (double g : inst.gaps)
      if (g > 0) min_gap = std::min(min_gap, g);
    epsilon = std::isinf(min_gap) ? 0.0 : 0.5 * min_gap;
  }
  const double mu_target = inst.mu_star - epsilon;

  EpisodeRecord rec;
  rec.seed = seed;
  rec.stream = stream;
  rec.T = T;
  rec.pulls.assign(A, 0);
  for (int c = 1; c <= T; c *= 2) rec.checkpoints.push_back(c);
  if (rec.checkpoints.empty() || rec.checkpoints.back() != T) rec.checkpoints.push_back(T);

  Rng rng(seed, stream);
  std::vector<std::vector<double>> sums(A);
  for (int a = 0; a < A; ++a) sums[a].assign(inst.models[a].K, 0.0);
  std::vector<uint64_t> n(A, 0);
  double regret = 0.0;
  uint64_t crossings = 0;
  std::size_t next_cp = 0;

  const auto pull = [&](int a) {
    const auto f = sample_stat(inst.models[a], inst.params[a], rng);
    for (std::size_t k = 0; k < f.size(); ++k) sums[a][k] += f[k];
    ++n[a];
    regret += inst.gaps[a];
  };
  const auto checkpoint = [&](int round) {
    while (next_cp < rec.checkpoints.size() && rec.checkpoints[next_cp] == round) {
      rec.regret_at.push_back(regret);
      rec.crossings_at.push_back(crossings);
      ++next_cp;
    }
  };

  for (int r = 1; r <= std::min(A, T); ++r) {
    pull(r - 1);
    checkpoint(r);
  }

  std::vector<double> stat;
  for (int r = A + 1; r <= T; ++r) {
    const int t = r - 1;
    // crossing counter for the optimal arm, before the decision
    {
      const int a = inst.best_arm;
      const double na = static_cast<double>(n[a]);
      double thr = kInf;
      bool have_thr = false;
      if (strategy == Strategy::KLUCB) {
        thr = threshold_f(static_cast<double>(t), xi);
        have_thr = true;
      } else if (t / na > 1.0) {
        thr = threshold_f(t / na, xi);
        have_thr = true;
      }
      if (have_thr) {
        stat.assign(inst.models[a].K, 0.0);
        for (int k = 0; k < inst.models[a].K; ++k) stat[k] = sums[a][k] / na;
        if (na * kinf_value_from_stat(inst.models[a], stat, n[a], mu_target) > thr) ++crossings;
      }
    }
    int choice = 0;
    double best = -kInf;
    for (int a = 0; a < A; ++a) {
      const double na = static_cast<double>(n[a]);
      double budget;
      if (strategy == Strategy::KLUCB) {
        budget = std::max(threshold_f(static_cast<double>(t), xi), 0.0) / na;
      } else {
        const double x = t / na;
        budget = (x <= 1.0) ? kInf : std::max(threshold_f(x, xi), 0.0) / na;
      }
      stat.assign(inst.models[a].K, 0.0);
      for (int k = 0; k < inst.models[a].K; ++k) stat[k] = sums[a][k] / na;
      const double u = ucb_index(inst.models[a], MeanParam{stat}, n[a], budget);
      if (u > best) {
        best = u;
        choice = a;
      }
    }
    pull(choice);
    checkpoint(r);
  }

  rec.pulls.assign(n.begin(), n.end());
  rec.final_regret = regret;
  return rec;
}

double pseudo_regret(const EpisodeRecord& rec, const BanditInstance& inst) {
  if (rec.pulls.size() != inst.gaps.size())
    throw MismatchError("record and instance arm counts disagree");
  uint64_t total = 0;
  double r = 0.0;
  for (std::size_t a = 0; a < rec.pulls.size(); ++a) {
    total += rec.pulls[a];
    r += inst.gaps[a] * static_cast<double>(rec.pulls[a]);
  }
  if (total != static_cast<uint64_t>(rec.T)) throw MismatchError("pull counts do not sum to T");
  return r;
}

std::vector<EpisodeRecord> run_episodes(const BanditInstance& inst, Strategy strategy, double xi,
                                        int T, int replicates, uint64_t seed, int threads) {
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  threads = std::max(1, threads);
  std::vector<EpisodeRecord> out(replicates);
  if (threads == 1) {
    for (int i = 0; i < replicates; ++i)
      out[i] = run_episode(inst, strategy, xi, T, seed, static_cast<uint64_t>(i));
    return out;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < replicates; i = next.fetch_add(1))
        out[i] = run_episode(inst, strategy, xi, T, seed, static_cast<uint64_t>(i));
    });
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace efb
