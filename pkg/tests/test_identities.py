import math

import pytest
from hypothesis import given, strategies as st
from pytest import approx

import erwhyp.identities as ids
from erwhyp.identities import (
    IdentityCase,
    eval_general,
    eval_stops,
    eval_t1,
    eval_t2,
    eval_t3,
    eval_t4,
    evaluate,
    identity_implied_moment,
    identity_series,
    rearranged,
    telescoping_term,
)
from erwhyp.moments import ErwParams, limit_moment
from erwhyp.specfun import DomainError, SeriesValue, log_gamma, pfq_sum_z1


def test_t1_at_one():
    r = eval_t1(1.0)
    assert r.lhs == 1.0
    assert r.rhs == approx(1.0, abs=1e-13)
    assert r.residual <= 1e-13 and r.passed


@pytest.mark.parametrize("fn, a, tol", [
    (eval_t1, 0.75, 1e-8),
    (eval_t2, 1.0, 1e-8),
    (eval_t2, 0.9, 1e-8),
    (eval_t3, 1.0, 1e-7),
    (eval_t3, 0.6, 1e-7),
    (eval_t4, 1.0, 1e-8),
    (eval_t4, 2.0, 1e-8),
])
def test_identity_examples(fn, a, tol):
    r = fn(a, tol)
    assert r.residual <= tol and r.passed


def test_t2_moment_side_at_one():
    assert eval_t2(1.0).lhs == approx(1.0, rel=1e-15)


def test_general_d2_at_one():
    r = eval_general(1.0, 2)
    assert r.lhs == approx(2.0, abs=1e-12)
    assert r.rhs == approx(2.0, rel=1e-15)


def test_general_d5():
    r = eval_general(0.8, 5)
    assert r.tolerance == 1e-6
    assert r.residual <= 1e-6 and r.passed
    assert len(r.series_tail_bounds) == 4


def test_t4_equals_stops_at_b_one():
    for a in (0.6, 1.0, 1.5):
        t4, st_ = eval_t4(a), eval_stops(a, 1.0)
        assert st_.lhs == approx(t4.lhs, rel=1e-9)
        assert st_.rhs == approx(t4.rhs, rel=1e-9)


def test_stops_examples():
    assert eval_stops(1.0, 1.0, 1e-8).passed
    r = eval_stops(1.0, 0.5, 1e-8)
    assert r.residual <= 1e-8 and r.passed


def test_stops_small_b_continuity():
    a = 1.0
    r = eval_stops(a, 1e-6, 1e-5)
    assert r.passed
    # b -> 0: 3F2(1,1,b;...) -> 1 and b 3F2(1,1,b+1;...) -> 0
    G = lambda x: math.exp(log_gamma(x))
    F = lambda n, d: pfq_sum_z1(ids.HypSeries(n, d), abs_tol=1e-13).value
    assert F((1, 1, 1e-6), (a + 1, a + 1)) == approx(1.0, abs=1e-5)
    limit_rhs = 1 / G(a + 1) ** 2 - a**2 / (2 * a * G(a + 2) ** 2) * 2 * a * F((1, 1, 2 * a + 1), (a + 2, a + 2))
    assert limit_rhs == approx(1 / (2 * a * G(2 * a)), rel=1e-12)
    assert r.rhs == approx(limit_rhs, rel=1e-5)


@pytest.mark.parametrize("kind, d", [("t1", 2), ("t2", 3), ("t3", 4)])
@pytest.mark.parametrize("a", [0.6, 0.9, 1.5])
def test_rearranged_matches_general(kind, d, a):
    series, closed = rearranged(kind, a)
    g = eval_general(a, d)
    assert series == approx(g.lhs, rel=1e-9)
    assert closed == approx(g.rhs, rel=1e-9)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("a", [0.6, 0.75, 1.0])
def test_identity_implied_moment(d, a):
    q = 0.85
    pr = ErwParams((a + 1) / 2, q)
    assert identity_implied_moment(a, 2 * q - 1, d) == approx(limit_moment(pr, d), rel=1e-9)


@pytest.mark.parametrize("call", [
    lambda: eval_t1(0.5),
    lambda: eval_t2(0.3),
    lambda: eval_t3(0.5),
    lambda: eval_t4(-1.0),
    lambda: eval_general(0.8, 1),
    lambda: eval_general(0.4, 3),
    lambda: eval_stops(0.5, 1.0),
    lambda: eval_stops(1.0, 0.0),
    lambda: IdentityCase("t5", 1.0),
    lambda: IdentityCase("general", 1.0, d=2.5),
    lambda: IdentityCase("stops", 1.0),
    lambda: identity_implied_moment(1.0, 1.0, 5),
    lambda: telescoping_term(1.0, 2, 1),
])
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()


def test_moment_side_uses_no_series(monkeypatch):
    base = eval_t3(0.8)
    shifted = lambda s, abs_tol: SeriesValue(pfq_sum_z1(s, abs_tol=abs_tol).value + 1e-3, 0.0, 1)
    monkeypatch.setattr(ids, "pfq_sum_z1", shifted)
    moved = eval_t3(0.8)
    assert moved.lhs == base.lhs and moved.rhs != base.rhs and not moved.passed


def test_series_side_uses_no_limit_moments():
    assert not any(name.startswith("limit_moment") for name in vars(ids))


def test_identity_series_matches_report_length():
    for case in [IdentityCase("t1", 0.8), IdentityCase("t2", 0.8), IdentityCase("t3", 0.8),
                 IdentityCase("t4", 0.8), IdentityCase("general", 0.8, d=6), IdentityCase("stops", 0.8, 0.3)]:
        assert len(identity_series(case)) == len(evaluate(case).series_tail_bounds)


def test_report_row_columns():
    row = eval_general(1.0, 3).as_row()
    assert list(row) == ["kind", "a", "b", "d", "lhs", "rhs", "residual", "tail_bound", "terms", "pass"]


@given(st.floats(0.55, 3.0), st.sampled_from(["t1", "t2", "t3", "t4"]))
def test_identities_hold_across_domain(a, kind):
    r = evaluate(IdentityCase(kind, a))
    assert r.residual >= 0
    assert r.passed == (r.residual <= r.tolerance + r.propagated_bound)
    assert r.passed


@given(st.floats(0.55, 2.5), st.integers(2, 5))
def test_general_holds_across_domain(a, d):
    assert eval_general(a, d).passed


@given(st.floats(0.2, 2.0), st.floats(0.05, 0.98))
def test_stops_holds_across_domain(a, frac):
    b = 2 * a * frac
    assert eval_stops(a, b).passed


def test_telescoping_small_case():
    lhs, rhs = telescoping_term(1.0, 2, 2)
    assert lhs == approx(-0.5, rel=1e-14)
    assert rhs == approx(-0.5, rel=1e-14)


def test_telescoping_sweep():
    for n in range(2, 51):
        lhs, rhs = telescoping_term(0.75, 3, n)
        assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


@given(st.floats(0.55, 3.0), st.integers(2, 7), st.integers(2, 10**6))
def test_telescoping_identity_property(a, d, n):
    lhs, rhs = telescoping_term(a, d, n)
    assert lhs < 0 and rhs < 0
    assert lhs == approx(rhs, rel=1e-10)


def test_telescoping_partial_sums():
    a, d = 0.8, 3
    target = math.exp(d * log_gamma(a + 1) - log_gamma(a * d + 1)) - 1
    scale = math.exp(log_gamma(a * d + 1))
    total, errors = 0.0, {}
    for n in range(2, 4001):
        total += telescoping_term(a, d, n)[0]
        if n in (1000, 2000, 4000):
            errors[n] = total / scale - target
    # leading correction decays like 1/N
    assert errors[1000] / errors[2000] == approx(2.0, rel=0.01)
    assert errors[2000] / errors[4000] == approx(2.0, rel=0.01)
