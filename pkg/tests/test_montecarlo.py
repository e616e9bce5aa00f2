import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from pytest import approx

from erwhyp.moments import ErwParams, moment_recursion
from erwhyp.montecarlo import SimConfig, default_workers, empirical_moment, l_scale, simulate
from erwhyp.specfun import DomainError, log_gamma


def z_scores(res, table, n):
    return [(m - float(table.moment(d, n))) / e for d, m, e in zip(res.orders, res.mean_s, res.stderr_s)]


def test_empirical_moment_examples():
    assert empirical_moment([3.0, 3.0, 3.0], 2) == (9.0, 0.0)
    assert empirical_moment([1, -1], 2) == (1.0, 0.0)
    m, e = empirical_moment([1, -1], 1)
    assert m == 0.0 and e == approx(1.0)
    with pytest.raises(ValueError):
        empirical_moment([1.0], 1)


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=50), st.integers(1, 4))
def test_empirical_moment_properties(xs, d):
    m, e = empirical_moment(xs, d)
    assert e >= 0
    assert m == approx(float(np.mean(np.asarray(xs) ** d)))


def test_deterministic_walk_exact():
    res = simulate(SimConfig(ErwParams(1, 1), 2000, 300, seed=3))
    assert res.mean_s == (2000.0, 2000.0**2, 2000.0**3, 2000.0**4)
    assert res.mean_l == (1.0, 1.0, 1.0, 1.0)
    assert res.stderr_s == (0.0,) * 4 and res.stderr_l == (0.0,) * 4


def test_always_left():
    res = simulate(SimConfig(ErwParams(1, 0), 50, 10, moment_orders=(1,)))
    assert np.all(res.samples == -50)


def test_l_scale():
    assert l_scale(7, 1.0) == 1 / 7
    assert l_scale(7, 0.0) == 1.0
    assert l_scale(100, 0.6) == approx(math.exp(log_gamma(100) - log_gamma(100.6)), rel=1e-13)


def test_reproducible():
    cfg = SimConfig(ErwParams(0.85, 0.9), 300, 5000, seed=11)
    a, b = simulate(cfg), simulate(cfg)
    assert a == b and np.array_equal(a.samples, b.samples)
    c = simulate(SimConfig(ErwParams(0.85, 0.9), 300, 5000, seed=12))
    assert not np.array_equal(a.samples, c.samples)


def test_worker_count_invariant():
    cfg = SimConfig(ErwParams.with_stops(0.6, 0.2, 0.2, 0.7), 200, 9000, seed=5, block_size=2048)
    one = simulate(cfg, workers=1)
    many = simulate(cfg, workers=3)
    assert one == many and np.array_equal(one.samples, many.samples)


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("ERW_WORKERS", "4")
    assert default_workers() == 4
    monkeypatch.setenv("ERW_WORKERS", "many")
    with pytest.raises(DomainError):
        default_workers()
    monkeypatch.delenv("ERW_WORKERS")
    assert default_workers() == 1


@pytest.mark.parametrize("p, q, n", [(0.85, 0.9, 101), (0.3, 0.5, 64), (0.5, 0.2, 33)])
def test_support_and_parity(p, q, n):
    s = simulate(SimConfig(ErwParams(p, q), n, 3000, seed=1)).samples
    assert np.all(np.abs(s) <= n)
    assert np.all((s - n) % 2 == 0)


def test_stops_support():
    n = 80
    s = simulate(SimConfig(ErwParams.with_stops(0.4, 0.2, 0.4, 0.5), n, 3000, seed=2)).samples
    assert np.all(np.abs(s) <= n)
    assert len(set((s % 2).tolist())) == 2  # zero steps break the parity lock


def test_oracle_agreement_grid():
    n = 2000
    zs = []
    for p in (0.2, 0.6, 0.9):
        for q in (0.5, 0.8):
            pr = ErwParams(p, q)
            res = simulate(SimConfig(pr, n, 4096, seed=2024))
            zs += z_scores(res, moment_recursion(pr, 4, n, mode="float"), n)
    inside = sum(abs(z) <= 4 for z in zs)
    assert inside >= 0.95 * len(zs)


def test_stops_against_recursion():
    pr = ErwParams.with_stops(0.55, 0.15, 0.3, 0.8)
    n = 400
    res = simulate(SimConfig(pr, n, 20000, seed=9))
    zs = z_scores(res, moment_recursion(pr, 4, n, mode="float"), n)
    assert all(abs(z) <= 4 for z in zs)


def test_stops_without_stopping_matches_standard():
    n = 500
    std = simulate(SimConfig(ErwParams(0.8, 0.7), n, 12000, seed=100))
    sto = simulate(SimConfig(ErwParams.with_stops(0.8, 0.2, 0.0, 0.7), n, 12000, seed=200))
    for m1, e1, m2, e2 in zip(std.mean_s, std.stderr_s, sto.mean_s, sto.stderr_s):
        assert abs(m1 - m2) <= 4 * math.hypot(e1, e2)


def test_l_moments_are_scaled_s_moments():
    res = simulate(SimConfig(ErwParams(0.9, 0.6), 300, 2000, seed=4))
    f = l_scale(300, 0.8)
    for d, ms, ml in zip(res.orders, res.mean_s, res.mean_l):
        assert ml == approx(ms * f**d, rel=1e-12)


@pytest.mark.parametrize("kwargs", [
    dict(n_steps=0, n_walks=10),
    dict(n_steps=10, n_walks=0),
    dict(n_steps=10, n_walks=10, moment_orders=()),
    dict(n_steps=10, n_walks=10, moment_orders=(0, 1)),
    dict(n_steps=10, n_walks=10, seed=-1),
])
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        SimConfig(ErwParams(0.8, 0.5), **kwargs)


def test_single_walk():
    res = simulate(SimConfig(ErwParams(0.8, 0.5), 10, 1, moment_orders=(2,)))
    assert res.stderr_s == (0.0,) and res.n_walks == 1


def test_result_rows():
    res = simulate(SimConfig(ErwParams(0.8, 0.5), 10, 100, moment_orders=(1, 3)))
    rows = res.rows()
    assert [r["d"] for r in rows] == [1, 3]
    assert res.to_dict()["config"]["n_walks"] == 100
