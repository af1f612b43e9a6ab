import math

import pytest

import efbounds as efb


def test_log_partition_and_grad():
    bern = efb.FamilyModel("bernoulli")
    assert efb.log_partition(bern, [0.0]) == pytest.approx(math.log(2.0), abs=1e-12)
    assert efb.grad_log_partition(bern, [0.0])[0] == pytest.approx(0.5, abs=1e-12)

    gauss = efb.FamilyModel("gaussian")
    assert efb.log_partition(gauss, [0.0, -0.5]) == pytest.approx(
        0.5 * math.log(2 * math.pi), abs=1e-12
    )
    with pytest.raises(efb.DomainError):
        efb.log_partition(gauss, [0.0, 0.5])


def test_bregman_kinf_roundtrip():
    bern = efb.FamilyModel("bernoulli")
    th = efb.mean_to_natural(bern, [0.4])
    r = efb.kinf(bern, th, 0.5)
    assert r.value == pytest.approx(efb.kl_bernoulli(0.4, 0.5), abs=1e-12)
    assert r.active

    disc = efb.FamilyModel("discrete", [0.0, 0.5, 1.0])
    rd = efb.kinf_discrete_dual([0.5, 0.3, 0.2], [0.0, 0.5, 1.0], 0.6)
    assert rd.value > 0
    assert rd.active


def test_bounds_surface():
    bern = efb.FamilyModel("bernoulli")
    region = efb.region_curvature(bern, {"mean": [0.2, 0.97]}, 0.3)
    cfg = efb.make_bound_config(
        bern, region, [efb.bernoulli_theta(0.9)], epsilon=0.1, xi=0.0
    )
    assert cfg.chi_eps > 0
    v = efb.cor1_bound(1024.0, cfg)
    assert 0 < v <= 1
    value, window = efb.cor2_bound(1e4, cfg)
    assert window in ("below_range", "mid_range", "high_range")
    assert efb.t_chi_exact(0.3) > 1e12
    assert efb.omega(0.0, 1) == pytest.approx(math.pi / 4, abs=1e-9)

    with pytest.raises(efb.ValidityError):
        efb.theorem_main_bound(1024.0, cfg, "f_of_t_over_n")


def test_episode_determinism_and_dp():
    bern = efb.FamilyModel("bernoulli")
    inst = efb.make_instance(
        [(bern, [efb.bernoulli_theta(0.9)]), (bern, [efb.bernoulli_theta(0.8)])]
    )
    a = efb.run_episode(inst, "klucb", 0.0, 300, seed=7)
    b = efb.run_episode(inst, "klucb", 0.0, 300, seed=7)
    assert a.pulls == b.pulls
    assert sum(a.pulls) == 300
    assert efb.pseudo_regret(a, inst) == pytest.approx(a.final_regret)

    region = efb.region_curvature(bern, {"mean": [0.2, 0.97]}, 0.3)
    exact = efb.exact_crossing_bernoulli(
        bern, [efb.bernoulli_theta(0.9)], 0.1, region, t=64
    )
    est = efb.estimate_crossing(
        bern, [efb.bernoulli_theta(0.9)], 0.1, region, t=64, n_runs=5000, seed=3
    )
    assert est.ci_low <= exact <= max(est.ci_high, exact)
