"""Both sides of the ERW hypergeometric identities, evaluated independently.

Closed (moment) sides use only ``log_gamma``; series sides use only
``pfq_sum_z1``.  Every report carries the per-series tail bounds and the
relative error they can induce, which is added to the pass threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb

from .specfun import DomainError, HypSeries, SeriesValue, log_gamma, log_gamma_ratio, pfq_sum_z1

__all__ = [
    "KINDS",
    "IdentityCase",
    "IdentityReport",
    "eval_t1",
    "eval_t2",
    "eval_t3",
    "eval_t4",
    "eval_general",
    "eval_stops",
    "evaluate",
    "rearranged",
    "identity_implied_moment",
    "general_series",
    "identity_series",
    "telescoping_term",
]

KINDS = ("t1", "t2", "t3", "t4", "general", "stops")
SERIES_TOL = 1e-13
RESIDUAL_FLOOR = 1e-14


def _G(x: float) -> float:
    return math.exp(log_gamma(x))


def _F(num, den) -> SeriesValue:
    return pfq_sum_z1(HypSeries(tuple(num), tuple(den)), abs_tol=SERIES_TOL)


@dataclass(frozen=True)
class IdentityCase:
    kind: str
    a: float
    b: float | None = None
    d: int | None = None
    tolerance: float = 1e-7

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown identity kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "stops":
            if self.b is None:
                raise DomainError("the stops identity needs b")
        elif not self.a > 0.5:
            raise DomainError(f"identity {self.kind} needs a > 1/2, got {self.a}")
        if self.kind == "general" and (self.d is None or int(self.d) != self.d or self.d < 2):
            raise DomainError(f"the general identity needs an integer d >= 2, got {self.d}")


@dataclass(frozen=True)
class IdentityReport:
    kind: str
    a: float
    b: float | None
    d: int | None
    lhs: float
    rhs: float
    residual: float
    tolerance: float
    series_tail_bounds: tuple[float, ...]
    terms_used: tuple[int, ...]
    propagated_bound: float  # relative error the tail bounds can cause
    passed: bool = field(default=False)

    @property
    def tail_bound(self) -> float:
        return max(self.series_tail_bounds, default=0.0)

    @property
    def terms(self) -> int:
        return max(self.terms_used, default=0)

    def as_row(self) -> dict:
        return {
            "kind": self.kind, "a": self.a, "b": self.b, "d": self.d,
            "lhs": self.lhs, "rhs": self.rhs, "residual": self.residual,
            "tail_bound": self.tail_bound, "terms": self.terms, "pass": self.passed,
        }


def _residual(lhs: float, rhs: float) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), RESIDUAL_FLOOR)


def _report(kind, a, b, d, lhs, rhs, tol, weighted: list[tuple[float, SeriesValue]]) -> IdentityReport:
    """``weighted`` pairs each series value with its coefficient on the series side."""
    res = _residual(lhs, rhs)
    scale = max(abs(lhs), abs(rhs), RESIDUAL_FLOOR)
    prop = math.fsum(abs(c) * sv.tail_bound for c, sv in weighted) / scale
    return IdentityReport(
        kind=kind, a=a, b=b, d=d, lhs=lhs, rhs=rhs, residual=res, tolerance=tol,
        series_tail_bounds=tuple(sv.tail_bound for _, sv in weighted),
        terms_used=tuple(sv.terms_used for _, sv in weighted),
        propagated_bound=prop, passed=res <= tol + prop,
    )


def _need_superdiffusive(a):
    if not a > 0.5:
        raise DomainError(f"identity needs a > 1/2, got a = {a}")


def eval_t1(a: float, tol: float = 1e-7) -> IdentityReport:
    """Second moment: 1/((2a-1)G(2a)) against the 3F2(1,1,2a+1; a+2,a+2) form."""
    _need_superdiffusive(a)
    lhs = 1.0 / ((2 * a - 1) * _G(2 * a))
    F = _F((1, 1, 2 * a + 1), (a + 2, a + 2))
    pre = 2 * a / ((2 * a - 1) * _G(a + 1) ** 2)
    c = (a / (a + 1)) ** 2
    rhs = pre * (1 - c * F.value)
    return _report("t1", a, None, None, lhs, rhs, tol, [(pre * c, F)])


def eval_t2(a: float, tol: float = 1e-7) -> IdentityReport:
    """Third moment with the common factor b cancelled; two 4F3 series."""
    _need_superdiffusive(a)
    lhs = (a + 1) / (a * (2 * a - 1) * _G(3 * a))
    den = (a + 2,) * 3
    F1 = _F((1, 1, 2, 3 * a + 1), den)
    F2 = _F((1, 1, 1, 3 * a + 1), den)
    pre = 3 * (a + 1) / ((2 * a - 1) * _G(a + 1) ** 3)
    c1 = 3 * a**2 / (a + 1) ** 3
    c2 = a**3 / (a + 1) ** 3
    rhs = pre * (1 - c1 * F1.value - c2 * F2.value)
    return _report("t2", a, None, None, lhs, rhs, tol, [(pre * c1, F1), (pre * c2, F2)])


def eval_t3(a: float, tol: float = 1e-7) -> IdentityReport:
    """Fourth moment; three 5F4 series."""
    _need_superdiffusive(a)
    num = 6 * (2 * a * a + 2 * a - 1)
    lhs = num / ((4 * a - 1) * (2 * a - 1) ** 2 * _G(4 * a))
    den = (a + 2,) * 4
    F1 = _F((1, 1, 2, 2, 4 * a + 1), den)
    F2 = _F((1, 1, 1, 2, 4 * a + 1), den)
    F3 = _F((1, 1, 1, 1, 4 * a + 1), den)
    pre = 4 * a * num / ((4 * a - 1) * (2 * a - 1) ** 2 * _G(a + 1) ** 4)
    c1 = 6 * a**2 / (a + 1) ** 4
    c2 = 4 * a**3 / (a + 1) ** 4
    c3 = a**4 / (a + 1) ** 4
    rhs = pre * (1 - c1 * F1.value - c2 * F2.value - c3 * F3.value)
    return _report("t3", a, None, None, lhs, rhs, tol, [(pre * c1, F1), (pre * c2, F2), (pre * c3, F3)])


def eval_t4(a: float, tol: float = 1e-7) -> IdentityReport:
    """Alternative second-moment identity with 3F2(1,1,1; a+1,a+1)."""
    _need_superdiffusive(a)
    lhs = 1.0 / ((2 * a - 1) * _G(2 * a))
    F0 = _F((1, 1, 1), (a + 1, a + 1))
    F1 = _F((1, 1, 2), (a + 2, a + 2))
    F2 = _F((1, 1, 2 * a + 1), (a + 2, a + 2))
    c0 = 1.0 / _G(a + 1) ** 2
    pre = a**2 / ((2 * a - 1) * _G(a + 2) ** 2)
    rhs = c0 * F0.value + pre * (F1.value - 2 * a * F2.value)
    return _report("t4", a, None, None, lhs, rhs, tol, [(c0, F0), (pre, F1), (2 * a * pre, F2)])


def eval_stops(a: float, b: float, tol: float = 1e-7) -> IdentityReport:
    """Walk-with-stops identity, valid for a > 0, b > 0, 2a > b; b = 1 gives eval_t4."""
    if not (a > 0 and b > 0):
        raise DomainError(f"stops identity needs a > 0 and b > 0, got a={a}, b={b}")
    if not 2 * a > b:
        raise DomainError(f"stops identity needs 2a > b, got a={a}, b={b}")
    lhs = 1.0 / ((2 * a - b) * _G(2 * a))
    F0 = _F((1, 1, b), (a + 1, a + 1))
    F1 = _F((1, 1, b + 1), (a + 2, a + 2))
    F2 = _F((1, 1, 2 * a + 1), (a + 2, a + 2))
    c0 = 1.0 / _G(a + 1) ** 2
    pre = a**2 / ((2 * a - b) * _G(a + 2) ** 2)
    rhs = c0 * F0.value + pre * (b * F1.value - 2 * a * F2.value)
    return _report("stops", a, b, None, lhs, rhs, tol, [(c0, F0), (b * pre, F1), (2 * a * pre, F2)])


def general_series(a: float, d: int, k: int) -> HypSeries:
    """{}_{d+1}F_d(1 x (d-k), 2 x k, ad+1; (a+2) x d; 1)."""
    return HypSeries((1.0,) * (d - k) + (2.0,) * k + (a * d + 1,), (a + 2,) * d)


def _general_parts(a, d):
    parts = []
    for k in range(d - 1):
        c = comb(d, k) * a ** (d - k)
        parts.append((c, pfq_sum_z1(general_series(a, d, k), abs_tol=SERIES_TOL)))
    return parts


def _general_closed(a, d):
    # (a+1)^d - G(a+2)^d / G(ad+1), Gamma quotient in log space
    return (a + 1) ** d - math.exp(d * log_gamma(a + 2) - log_gamma(a * d + 1))


def eval_general(a: float, d: int, tol: float | None = None) -> IdentityReport:
    """sum_{k<=d-2} C(d,k) a^(d-k) F_k = (a+1)^d - G(a+2)^d/G(ad+1)."""
    _need_superdiffusive(a)
    if int(d) != d or d < 2:
        raise DomainError(f"general identity needs integer d >= 2, got {d}")
    d = int(d)
    if tol is None:
        tol = 1e-6 if d >= 5 else 1e-7
    parts = _general_parts(a, d)
    lhs = math.fsum(c * sv.value for c, sv in parts)
    rhs = _general_closed(a, d)
    return _report("general", a, None, d, lhs, rhs, tol, parts)


def identity_series(case: IdentityCase) -> list[HypSeries]:
    """The series an identity evaluates, in the order of its report's tail bounds."""
    a, b = case.a, case.b
    if case.kind == "t1":
        groups = [((1, 1, 2 * a + 1), (a + 2, a + 2))]
    elif case.kind == "t2":
        groups = [((1, 1, 2, 3 * a + 1), (a + 2,) * 3), ((1, 1, 1, 3 * a + 1), (a + 2,) * 3)]
    elif case.kind == "t3":
        groups = [(num + (4 * a + 1,), (a + 2,) * 4) for num in ((1, 1, 2, 2), (1, 1, 1, 2), (1, 1, 1, 1))]
    elif case.kind == "t4":
        groups = [((1, 1, 1), (a + 1, a + 1)), ((1, 1, 2), (a + 2, a + 2)), ((1, 1, 2 * a + 1), (a + 2, a + 2))]
    elif case.kind == "stops":
        groups = [((1, 1, b), (a + 1, a + 1)), ((1, 1, b + 1), (a + 2, a + 2)), ((1, 1, 2 * a + 1), (a + 2, a + 2))]
    else:
        return [general_series(a, case.d, k) for k in range(case.d - 1)]
    return [HypSeries(n, d) for n, d in groups]


def evaluate(case: IdentityCase) -> IdentityReport:
    if case.kind == "t1":
        return eval_t1(case.a, case.tolerance)
    if case.kind == "t2":
        return eval_t2(case.a, case.tolerance)
    if case.kind == "t3":
        return eval_t3(case.a, case.tolerance)
    if case.kind == "t4":
        return eval_t4(case.a, case.tolerance)
    if case.kind == "general":
        return eval_general(case.a, case.d, case.tolerance)
    return eval_stops(case.a, case.b, case.tolerance)


def rearranged(kind: str, a: float) -> tuple[float, float]:
    """The t1, t2, t3 identities solved into the general-identity shape.

    Returns (series combination, closed value) where the series combination
    is built from the series the named identity uses and the closed value
    from that identity's moment side; both should match ``eval_general``
    at d = 2, 3, 4 for kinds t1, t2, t3.
    """
    _need_superdiffusive(a)
    if kind == "t1":
        F = _F((1, 1, 2 * a + 1), (a + 2, a + 2)).value
        m2 = 1.0 / ((2 * a - 1) * _G(2 * a))
        closed = (a + 1) ** 2 * (1 - m2 * (2 * a - 1) * _G(a + 1) ** 2 / (2 * a))
        return a**2 * F, closed
    if kind == "t2":
        den = (a + 2,) * 3
        F1 = _F((1, 1, 2, 3 * a + 1), den).value
        F2 = _F((1, 1, 1, 3 * a + 1), den).value
        m3 = (a + 1) / (a * (2 * a - 1) * _G(3 * a))
        closed = (a + 1) ** 3 * (1 - m3 * (2 * a - 1) * _G(a + 1) ** 3 / (3 * (a + 1)))
        return 3 * a**2 * F1 + a**3 * F2, closed
    if kind == "t3":
        den = (a + 2,) * 4
        F1 = _F((1, 1, 2, 2, 4 * a + 1), den).value
        F2 = _F((1, 1, 1, 2, 4 * a + 1), den).value
        F3 = _F((1, 1, 1, 1, 4 * a + 1), den).value
        num = 6 * (2 * a * a + 2 * a - 1)
        m4 = num / ((4 * a - 1) * (2 * a - 1) ** 2 * _G(4 * a))
        pre = 4 * a * num / ((4 * a - 1) * (2 * a - 1) ** 2 * _G(a + 1) ** 4)
        closed = (a + 1) ** 4 * (1 - m4 / pre)
        return 6 * a**2 * F1 + 4 * a**3 * F2 + a**4 * F3, closed
    raise DomainError(f"no rearranged form for {kind!r}")


def identity_implied_moment(a: float, b: float, d: int) -> float:
    """E[L^d] read off the series side of the d = 2, 3, 4 identities."""
    if d == 2:
        return eval_t1(a).rhs
    if d == 3:
        return b * eval_t2(a).rhs
    if d == 4:
        return eval_t3(a).rhs
    raise DomainError(f"identity-implied moments exist for d = 2, 3, 4, got {d}")


def telescoping_term(a: float, d: int, n: int) -> tuple[float, float]:
    """One increment of u_n = a_n^d G(n+ad)/G(n), computed two ways.

    lhs is u_n - u_{n-1} from the ratio u_n/u_{n-1} = (1 + ad/(n-1)) / (1 + a/(n-1))^d;
    rhs is -G(a+1)^d G(n-1)^(d-1) G(n-1+ad) / G(n+a)^d * sum_{k<=d-2} C(d,k) (n-1)^k a^(d-k).
    """
    if n < 2 or d < 2:
        raise DomainError(f"telescoping_term needs n >= 2 and d >= 2, got n={n}, d={d}")
    if not a > 0.5:
        raise DomainError(f"telescoping_term needs a > 1/2, got {a}")
    m = n - 1
    lga1 = log_gamma(a + 1)
    # ln u_{n-1} = d ln G(a+1) + ln G(m+ad)/G(m) - d ln G(m+a)/G(m)
    log_prev = d * lga1 + log_gamma_ratio(m, a * d) - d * log_gamma_ratio(m, a)
    step = math.log1p(a * d / m) - d * math.log1p(a / m)
    lhs = math.exp(log_prev) * math.expm1(step)

    poly = math.fsum(comb(d, k) * m**k * a ** (d - k) for k in range(d - 1))
    # G(n-1)^(d-1) G(n-1+ad) / G(n+a)^d = exp(ln G(m+ad)/G(m) - d ln G(m+1+a)/G(m))
    log_mag = d * lga1 + log_gamma_ratio(m, a * d) - d * log_gamma_ratio(m, a + 1) + math.log(poly)
    rhs = -math.exp(log_mag)
    return lhs, rhs
