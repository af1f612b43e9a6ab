#include <doctest.h>

#include <cmath>

#include "efb/family.hpp"

using namespace efb;

namespace {
// central-difference oracles for gradient / Hessian consistency
double fd_grad(const FamilyModel& m, const NaturalParam& th, int k, double h = 1e-6) {
  NaturalParam p = th, q = th;
  p.theta[k] += h;
  q.theta[k] -= h;
  return (log_partition(m, p) - log_partition(m, q)) / (2 * h);
}
double fd_hess(const FamilyModel& m, const NaturalParam& th, int i, int j, double h = 1e-5) {
  NaturalParam p = th, q = th;
  p.theta[j] += h;
  q.theta[j] -= h;
  return (grad_log_partition(m, p)[i] - grad_log_partition(m, q)[i]) / (2 * h);
}
}  // namespace

TEST_CASE("log_partition closed forms") {
  const auto bern = FamilyModel::bernoulli();
  CHECK(log_partition(bern, NaturalParam{{0.0}}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(log_partition(bern, NaturalParam{{std::log(9.0)}}) ==
        doctest::Approx(std::log(10.0)).epsilon(1e-12));

  const auto gauss = FamilyModel::gaussian_mean_var();
  CHECK(log_partition(gauss, NaturalParam{{0.0, -0.5}}) ==
        doctest::Approx(0.5 * std::log(2.0 * M_PI)).epsilon(1e-12));
  CHECK_THROWS_AS(log_partition(gauss, NaturalParam{{0.0, 0.5}}), DomainError);

  const auto disc = FamilyModel::discrete({0.0, 1.0});
  CHECK(log_partition(disc, NaturalParam{{0.0}}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("grad_log_partition examples") {
  const auto bern = FamilyModel::bernoulli();
  CHECK(grad_log_partition(bern, NaturalParam{{0.0}})[0] == doctest::Approx(0.5).epsilon(1e-12));

  const auto gauss = FamilyModel::gaussian_mean_var();
  const auto g = grad_log_partition(gauss, NaturalParam{{0.5, -0.25}});  // N(1, 2)
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(3.0).epsilon(1e-12));

  const auto disc = FamilyModel::discrete({0.0, 1.0});
  CHECK(grad_log_partition(disc, NaturalParam{{0.0}})[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("hessian examples and finite differences") {
  const auto bern = FamilyModel::bernoulli();
  CHECK(hessian_log_partition(bern, NaturalParam{{0.0}})[0][0] ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(hessian_log_partition(bern, NaturalParam{{bernoulli_theta(0.9)}})[0][0] ==
        doctest::Approx(0.09).epsilon(1e-12));

  const auto gauss = FamilyModel::gaussian_mean_var();
  Rng rng(7, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const NaturalParam th{{4.0 * rng.uniform() - 2.0, -0.2 - 2.0 * rng.uniform()}};
    for (int k = 0; k < 2; ++k)
      CHECK(grad_log_partition(gauss, th)[k] ==
            doctest::Approx(fd_grad(gauss, th, k)).epsilon(1e-6));
    const auto h = hessian_log_partition(gauss, th);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(h[i][j] == doctest::Approx(fd_hess(gauss, th, i, j)).epsilon(1e-5));
  }

  const auto disc = FamilyModel::discrete({0.0, 0.3, 1.0});
  for (int rep = 0; rep < 20; ++rep) {
    const NaturalParam th{{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0}};
    for (int k = 0; k < 2; ++k)
      CHECK(grad_log_partition(disc, th)[k] ==
            doctest::Approx(fd_grad(disc, th, k)).epsilon(1e-6));
    const auto h = hessian_log_partition(disc, th);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(h[i][j] == doctest::Approx(fd_hess(disc, th, i, j)).epsilon(1e-5));
  }
}

TEST_CASE("bregman equals the closed-form divergences") {
  const auto bern = FamilyModel::bernoulli();
  const NaturalParam t05{{0.0}}, t025{{bernoulli_theta(0.25)}};
  CHECK(bregman(bern, t05, t05) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(bregman(bern, t05, t025) == doctest::Approx(kl_bernoulli(0.5, 0.25)).epsilon(1e-12));
  CHECK(kl_bernoulli(0.5, 0.25) == doctest::Approx(0.143841).epsilon(1e-5));

  const auto gauss = FamilyModel::gaussian_mean_var();
  const NaturalParam n01{{0.0, -0.5}}, n02{{0.0, -0.25}};
  CHECK(bregman(gauss, n01, n02) == doctest::Approx(kl_gaussian(0, 1, 0, 2)).epsilon(1e-12));
  CHECK(kl_gaussian(0, 1, 0, 2) == doctest::Approx(0.096574).epsilon(1e-5));

  // nonnegativity on random pairs
  Rng rng(11, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const NaturalParam a{{4 * rng.uniform() - 2, -0.1 - 2 * rng.uniform()}};
    const NaturalParam b{{4 * rng.uniform() - 2, -0.1 - 2 * rng.uniform()}};
    CHECK(bregman(gauss, a, b) >= -1e-12);
  }
}

TEST_CASE("fenchel_dual via duality") {
  const auto bern = FamilyModel::bernoulli();
  const NaturalParam tstar{{0.0}};
  CHECK(fenchel_dual(bern, tstar, MeanParam{{0.5}}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fenchel_dual(bern, tstar, MeanParam{{0.25}}) ==
        doctest::Approx(kl_bernoulli(0.25, 0.5)).epsilon(1e-12));

  const auto gauss = FamilyModel::gaussian_mean_var();
  const NaturalParam n01{{0.0, -0.5}};
  CHECK(fenchel_dual(gauss, n01, MeanParam{{0.0, 2.0}}) ==
        doctest::Approx(kl_gaussian(0, 2, 0, 1)).epsilon(1e-12));
  CHECK_THROWS_AS(fenchel_dual(bern, tstar, MeanParam{{1.0}}), InversionError);
}

TEST_CASE("mean_to_natural round trips") {
  const auto bern = FamilyModel::bernoulli();
  CHECK(mean_to_natural(bern, MeanParam{{0.5}})[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mean_to_natural(bern, MeanParam{{0.9}})[0] ==
        doctest::Approx(std::log(9.0)).epsilon(1e-12));
  CHECK_THROWS_AS(mean_to_natural(bern, MeanParam{{0.0}}), BoundaryError);
  CHECK_THROWS_AS(mean_to_natural(bern, MeanParam{{1.0}}), BoundaryError);

  const auto gauss = FamilyModel::gaussian_mean_var();
  const auto th = mean_to_natural(gauss, MeanParam{{1.0, 3.0}});
  CHECK(th[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(th[1] == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK_THROWS_AS(mean_to_natural(gauss, MeanParam{{1.0, 1.0}}), BoundaryError);

  Rng rng(3, 0);
  const auto disc = FamilyModel::discrete({0.0, 0.5, 1.0});
  for (int rep = 0; rep < 100; ++rep) {
    const NaturalParam th2{{2 * rng.uniform() - 1, 2 * rng.uniform() - 1}};
    const auto f = grad_log_partition(disc, th2);
    const auto back = mean_to_natural(disc, f);
    for (int k = 0; k < 2; ++k) CHECK(back[k] == doctest::Approx(th2[k]).epsilon(1e-9));
  }
}

TEST_CASE("sampling: determinism and moments") {
  const auto bern = FamilyModel::bernoulli();
  const NaturalParam th{{0.0}};
  const auto a = sample_sufficient_stats(bern, th, 1000, 42);
  const auto b = sample_sufficient_stats(bern, th, 1000, 42);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i][0] == b[i][0]);
  // Hoeffding-scale agreement at n = 1e5
  const auto c = sample_sufficient_stats(bern, th, 100000, 7);
  CHECK(std::fabs(c.back()[0] - 0.5) < 0.01);

  const auto gauss = FamilyModel::gaussian_mean_var();
  const NaturalParam gth{{0.5, -0.25}};  // N(1,2): E F = (1, 3)
  const auto g = sample_sufficient_stats(gauss, gth, 100000, 9);
  // within 4 standard errors
  CHECK(std::fabs(g.back()[0] - 1.0) < 4.0 * std::sqrt(2.0 / 100000.0));
  CHECK(std::fabs(g.back()[1] - 3.0) < 4.0 * std::sqrt(14.0 / 100000.0));

  const auto disc = FamilyModel::discrete({0.0, 0.5, 1.0});
  const auto dth = mean_to_natural(disc, MeanParam{{0.3, 0.3}});
  const auto d = sample_sufficient_stats(disc, dth, 100000, 13);
  CHECK(std::fabs(d.back()[0] - 0.3) < 0.01);
  CHECK(std::fabs(d.back()[1] - 0.3) < 0.01);
}

TEST_CASE("log-Laplace control holds on psi evaluations") {
  // psi(th*+eta) - psi(th*) <= <eta, grad psi(th*)> + (V/2) |eta|^2 with V the
  // max Hessian eigenvalue along the segment; checked with a generous V.
  const auto gauss = FamilyModel::gaussian_mean_var();
  const NaturalParam tstar{{0.3, -0.6}};
  Rng rng(5, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const double e1 = 0.4 * rng.uniform() - 0.2, e2 = 0.2 * rng.uniform() - 0.1;
    const NaturalParam shifted{{tstar[0] + e1, tstar[1] + e2}};
    if (!gauss.in_domain(shifted)) continue;
    // V over the little box around tstar: variance <= -1/(2*(t2max)),
    // conservative envelope from the region formulas (evaluated directly)
    double Vmax = 0.0;
    for (double a : {tstar[0] - 0.2, tstar[0] + 0.2})
      for (double b : {tstar[1] - 0.1, tstar[1] + 0.1}) {
        const double var = -0.5 / b, mu = a * var;
        Vmax = std::max(Vmax, var * (1 + 2 * var + 4 * mu * mu));
      }
    const double lhs = log_partition(gauss, shifted) - log_partition(gauss, tstar);
    const auto g = grad_log_partition(gauss, tstar);
    const double rhs = e1 * g[0] + e2 * g[1] + 0.5 * Vmax * (e1 * e1 + e2 * e2);
    CHECK(lhs <= rhs + 1e-12);
  }
}
