#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "efb/family.hpp"

namespace efb {

struct BanditInstance {
  std::vector<FamilyModel> models;
  std::vector<NaturalParam> params;
  // derived
  std::vector<double> means;
  std::vector<double> gaps;
  double mu_star = 0.0;
  int best_arm = 0;
};

BanditInstance make_instance(std::vector<std::pair<FamilyModel, NaturalParam>> arms);

enum class Strategy { KLUCB, KLUCBplus };

struct EpisodeRecord {
  uint64_t seed = 0;
  uint64_t stream = 0;
  int T = 0;
  std::vector<uint64_t> pulls;        // N_a(T)
  std::vector<int> checkpoints;       // {2^k <= T} plus T
  std::vector<double> regret_at;      // cumulative pseudo-regret at checkpoints
  std::vector<uint64_t> crossings_at; // cumulative crossing-event counter
  double final_regret = 0.0;
};

// max{ mu in Omega \ {mu+} : Kinf(Pi(nu_hat), mu) <= budget }, bisection on mu
// to 1e-9. Empirical stats at the top boundary return mu+ (optimism); an
// infinite budget returns mu+.
double ucb_index(const FamilyModel& m, const MeanParam& emp, uint64_t n_pulls, double budget);

// Algorithm: pull each arm once, then argmax of the index with budget
// f(t)/N_a(t) (KLUCB) or f(t/N_a(t))/N_a(t) (KLUCBplus). Ties break to the
// lowest arm index; threshold arguments <= 1 give an infinite budget and
// negative threshold values a zero one. epsilon < 0 means "half the minimal
// positive gap" for the crossing counter.
EpisodeRecord run_episode(const BanditInstance& inst, Strategy strategy, double xi, int T,
                          uint64_t seed, uint64_t stream = 0, double epsilon = -1.0);

double pseudo_regret(const EpisodeRecord& rec, const BanditInstance& inst);

// Deterministic replicate fan-out: replicate i uses stream i, results are
// ordered by index regardless of thread count.
std::vector<EpisodeRecord> run_episodes(const BanditInstance& inst, Strategy strategy, double xi,
                                        int T, int replicates, uint64_t seed, int threads = 1);

}  // namespace efb
