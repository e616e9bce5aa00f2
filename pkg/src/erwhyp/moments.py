"""Moments of the elephant random walk: exact recursion, closed forms, scaling limits.

Arithmetic is carried in ``Fraction`` whenever the walk parameters are
rational (``int``, ``Fraction`` or a ``"num/den"`` string) and in ``float``
otherwise; Python's numeric tower already promotes mixed operations to float,
so the two-mode scalar needs no wrapper type.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Union

import numpy as np

from .specfun import DomainError, log_gamma, log_gamma_ratio, pochhammer

__all__ = [
    "Numeric",
    "ErwParams",
    "MomentTable",
    "ScaledMoment",
    "parse_number",
    "a_n",
    "step_coeff",
    "moment_recursion",
    "stops_moment_recursion",
    "closed_moment",
    "scaled_moment",
    "scaled_moment_path",
    "limit_moment",
    "limit_moment_numeric",
    "correction_exponents",
]

Numeric = Union[Fraction, float]


def parse_number(x) -> Numeric:
    """``"4/5"`` and integers become Fractions, decimals become floats."""
    if isinstance(x, bool):
        raise TypeError("bool is not a walk parameter")
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        text = x.strip()
        if "/" in text:
            return Fraction(text)
        try:
            return Fraction(int(text))
        except ValueError:
            return float(text)
    raise TypeError(f"cannot interpret {x!r} as a number")


def _is_exact(*xs) -> bool:
    return all(isinstance(x, (Fraction, int)) for x in xs if x is not None)


@dataclass(frozen=True)
class ErwParams:
    """Walk parameters.

    Standard walk (``s is None``): repeat the remembered step with probability
    ``p``, first step +1 with probability ``q``; ``r`` must be 0.

    Walk with stops (``s`` given): repeat with probability ``p``, reverse with
    ``q``, stay put with ``r`` (``p + q + r = 1``); first step +1 with
    probability ``s``.
    """

    p: Numeric
    q: Numeric
    r: Numeric = 0
    s: Numeric | None = None

    def __post_init__(self):
        for name in ("p", "q", "r", "s"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, parse_number(v))
        for name in ("p", "q") + (("s",) if self.s is not None else ()):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise DomainError(f"{name}={v} must lie in [0, 1]")
        if not 0 <= self.r < 1:
            raise DomainError(f"r={self.r} must lie in [0, 1)")
        if self.s is None:
            if self.r != 0:
                raise DomainError("a stop probability r > 0 needs the stops parametrisation (pass s)")
        else:
            total = self.p + self.q + self.r
            ok = total == 1 if _is_exact(self.p, self.q, self.r) else abs(total - 1) <= 1e-12
            if not ok:
                raise DomainError(f"stops mode needs p + q + r = 1, got {total}")

    @classmethod
    def with_stops(cls, p, q, r, s) -> "ErwParams":
        return cls(p=p, q=q, r=r, s=s)

    @property
    def stops(self) -> bool:
        return self.s is not None

    @property
    def a(self) -> Numeric:
        return self.p - self.q if self.stops else 2 * self.p - 1

    @property
    def b(self) -> Numeric:
        return 2 * (self.s if self.stops else self.q) - 1

    @property
    def first_step(self) -> Numeric:
        return self.s if self.stops else self.q

    @property
    def exact(self) -> bool:
        return _is_exact(self.p, self.q, self.r, self.s)

    @property
    def superdiffusive(self) -> bool:
        return self.a > Fraction(1, 2)

    def as_float(self) -> "ErwParams":
        conv = lambda v: None if v is None else float(v)
        return ErwParams(conv(self.p), conv(self.q), conv(self.r), conv(self.s))


@dataclass(frozen=True)
class MomentTable:
    """E[S_n^k] for 1 <= k <= d and 1 <= n <= n_max."""

    d: int
    n_max: int
    entries: tuple[tuple[Numeric, ...], ...]  # entries[n - 1][k - 1]
    source: str  # "recursion" | "closed_form"
    arithmetic: str  # "exact" | "float"

    def moment(self, k: int, n: int) -> Numeric:
        if not (1 <= k <= self.d and 1 <= n <= self.n_max):
            raise IndexError(f"(k={k}, n={n}) outside table d={self.d}, n_max={self.n_max}")
        return self.entries[n - 1][k - 1]

    def column(self, k: int) -> list[Numeric]:
        return [row[k - 1] for row in self.entries]


@dataclass(frozen=True)
class ScaledMoment:
    """E[L_n^d] = a_n^d E[S_n^d] / Gamma(a+1)^d."""

    n: int
    d: int
    value: float


def a_n(n: int, a: Numeric) -> Numeric:
    """a_n = prod_{k<n} k/(k+a) = Gamma(n) Gamma(a+1) / Gamma(n+a)."""
    if n < 1:
        raise DomainError(f"a_n needs n >= 1, got {n}")
    if isinstance(a, (Fraction, int)):
        out = Fraction(1)
        for k in range(1, n):
            out *= Fraction(k) / (k + a)
        return out
    if not a > -1:
        raise DomainError(f"float a_n needs a > -1, got {a}")
    return math.exp(log_gamma(a + 1) - log_gamma_ratio(n, a))


def step_coeff(k: int, d: int, n: int, a: Numeric) -> Numeric:
    """A_{k,d,n} = C(d, 2k) + (a/n) C(d, 2k+1)."""
    if not (0 <= 2 * k <= d and n >= 1):
        raise DomainError(f"step_coeff needs 0 <= 2k <= d and n >= 1, got k={k}, d={d}, n={n}")
    if isinstance(a, (Fraction, int)):
        return comb(d, 2 * k) + Fraction(a) / n * comb(d, 2 * k + 1)
    return comb(d, 2 * k) + a / n * comb(d, 2 * k + 1)


def _resolve_mode(params: ErwParams, mode: str) -> tuple[ErwParams, str]:
    if mode not in ("exact", "float"):
        raise ValueError(f"mode must be 'exact' or 'float', got {mode!r}")
    if mode == "exact" and not params.exact:
        warnings.warn("exact mode needs rational parameters; falling back to float", stacklevel=3)
        mode = "float"
    return (params if mode == "exact" else params.as_float()), mode


def _check_finite(row, n):
    if not all(math.isfinite(v) for v in row):
        raise OverflowError(
            f"float moment recursion overflowed at n={n}; use exact mode or the log-space closed forms")


def moment_recursion(params: ErwParams, d: int, n_max: int, mode: str = "exact") -> MomentTable:
    """Fill E[S_n^k], k <= d, n <= n_max, by the joint recursion over all orders.

    E[S_{n+1}^k] = sum_j A_{j,k,n} E[S_n^{k-2j}] + [k even], the sum running
    over k - 2j >= 1.  All parities are advanced together since odd orders
    feed even ones.
    """
    if params.stops:
        return stops_moment_recursion(params, d, n_max, mode)
    if d < 1 or n_max < 1:
        raise DomainError("moment_recursion needs d >= 1 and n_max >= 1")
    params, mode = _resolve_mode(params, mode)
    a, b = params.a, params.b
    one = Fraction(1) if mode == "exact" else 1.0
    binoms = [[comb(k, i) for i in range(k + 2)] for k in range(d + 1)]

    cur = [one] + [b if k % 2 else one for k in range(1, d + 1)]
    rows = [tuple(cur[1:])]
    for n in range(1, n_max):
        an = a / n
        new = [one]
        for k in range(1, d + 1):
            ck = binoms[k]
            acc = one if k % 2 == 0 else 0 * one
            for j in range((k + 1) // 2):
                acc += (ck[2 * j] + an * ck[2 * j + 1]) * cur[k - 2 * j]
            new.append(acc)
        cur = new
        rows.append(tuple(cur[1:]))
    if mode == "float":
        _check_finite(rows[-1], n_max)
    return MomentTable(d, n_max, tuple(rows), "recursion", mode)


def _stops_plan(d: int):
    """Update rules for the joint moments E[S^i T^j], i + 2j <= d.

    T_n counts the non-zero steps up to time n; conditionally on the past,
    E[X] = (p - q) S/n and E[X^m] = (p + q) T/n for even m >= 2.
    """
    states = [(i, j) for j in range(d // 2 + 1) for i in range(d - 2 * j + 1)]
    plan = {}
    for i, j in states:
        rules = []
        for u in range(i + 1):
            for v in range(j + 1):
                c = comb(i, u) * comb(j, v)
                m = u + 2 * v
                if m == 0:
                    rules.append((c, 0, (i, j)))
                elif m % 2:
                    rules.append((c, 1, (i - u + 1, j - v)))
                else:
                    rules.append((c, 2, (i - u, j - v + 1)))
        plan[(i, j)] = rules
    return states, plan


def stops_moment_recursion(params: ErwParams, d: int, n_max: int, mode: str = "exact") -> MomentTable:
    """E[S_n^k] for the walk with stops, via the closed system of moments E[S^i T^j].

    With no stops (r = 0) T_n = n and this reduces to the standard recursion.
    """
    if not params.stops:
        raise DomainError("stops_moment_recursion needs stops parameters (s given)")
    if d < 1 or n_max < 1:
        raise DomainError("stops_moment_recursion needs d >= 1 and n_max >= 1")
    params, mode = _resolve_mode(params, mode)
    one = Fraction(1) if mode == "exact" else 1.0
    odd_w = params.p - params.q
    even_w = params.p + params.q
    b = params.b
    states, plan = _stops_plan(d)

    # S_1 = +-1 and T_1 = 1: the first step never stops
    cur = {(i, j): (b if i % 2 else one) for i, j in states}
    rows = [tuple(cur[(k, 0)] for k in range(1, d + 1))]
    for n in range(1, n_max):
        w = (one, odd_w / n, even_w / n)
        new = {}
        for st in states:
            acc = 0 * one
            for c, kind, src in plan[st]:
                acc += c * w[kind] * cur[src]
            new[st] = acc
        cur = new
        rows.append(tuple(cur[(k, 0)] for k in range(1, d + 1)))
    if mode == "float":
        _check_finite(rows[-1], n_max)
    return MomentTable(d, n_max, tuple(rows), "recursion", mode)


def _closed_exact(a: Fraction, b: Fraction, d: int, n: int) -> Fraction:
    fact = Fraction(math.factorial(n - 1))
    if d == 2:
        return n / (2 * a - 1) * (pochhammer(2 * a, n) / (fact * n) - 1)
    if d == 3:
        bracket = 3 * (a + 1) * pochhammer(3 * a + 1, n - 1) - pochhammer(a + 1, n - 1) * (3 * n + a + 1)
        return b / (2 * a - 1) * bracket / fact
    c4 = 6 * (2 * a * a + 2 * a - 1) / (4 * a - 1)
    bracket = (c4 * pochhammer(4 * a, n) / fact
               - 2 * (3 * n + 2 + 2 * a) * pochhammer(2 * a, n) / fact
               + (4 * a * a - 12 * a + 5) / (4 * a - 1) * n
               + 3 * n * (n + 1))
    return bracket / (2 * a - 1) ** 2


def _closed_float(a: float, b: float, d: int, n: int) -> float:
    if not a > 0:
        raise DomainError("float closed forms are evaluated in log space and need a > 0; use exact mode")
    lg, lgr = log_gamma, log_gamma_ratio
    if d == 2:
        return n / (2 * a - 1) * math.expm1(lgr(n + 1, 2 * a - 1) - lg(2 * a))
    if d == 3:
        bracket = (3 * (a + 1) * math.exp(lgr(n, 3 * a) - lg(3 * a + 1))
                   - (3 * n + a + 1) * math.exp(lgr(n, a) - lg(a + 1)))
        return b / (2 * a - 1) * bracket
    c4 = 6 * (2 * a * a + 2 * a - 1) / (4 * a - 1)
    bracket = (c4 * math.exp(lgr(n, 4 * a) - lg(4 * a))
               - 2 * (3 * n + 2 + 2 * a) * math.exp(lgr(n, 2 * a) - lg(2 * a))
               + (4 * a * a - 12 * a + 5) / (4 * a - 1) * n
               + 3 * n * (n + 1))
    return bracket / (2 * a - 1) ** 2


def closed_moment(params: ErwParams, d: int, n: int, mode: str | None = None) -> Numeric:
    """Closed form of E[S_n^d] for d in {2, 3, 4} (standard walk).

    Exact mode evaluates the Gamma ratios as Pochhammer products; float mode
    works in log space.  Defaults to exact when the parameters are rational.
    """
    if params.stops:
        raise DomainError("closed forms are for the standard walk")
    if d not in (2, 3, 4):
        raise DomainError(f"closed forms exist for d = 2, 3, 4 only, got {d}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    params, mode = _resolve_mode(params, mode or ("exact" if params.exact else "float"))
    a, b = params.a, params.b
    if 2 * a - 1 == 0:
        raise DomainError("closed form singular: factor 2a - 1 vanishes (p = 3/4)")
    if d == 4 and 4 * a - 1 == 0:
        raise DomainError("closed form singular: factor 4a - 1 vanishes (p = 5/8)")
    if mode == "exact":
        return _closed_exact(a, b, d, n)
    return _closed_float(a, b, d, n)


def _scale(value: float, d: int, n: int, a: float) -> float:
    # a_n^d / Gamma(a+1)^d = exp(-d * ln(Gamma(n+a)/Gamma(n)))
    if value == 0:
        return 0.0
    return math.copysign(math.exp(math.log(abs(value)) - d * log_gamma_ratio(n, a)), value)


def scaled_moment(params: ErwParams, d: int, n: int, source: str = "recursion") -> ScaledMoment:
    """E[L_n^d] from the recursion (default) or, for d <= 4, the closed forms."""
    if not params.superdiffusive:
        raise DomainError(f"scaled moments need a > 1/2, got a = {params.a}")
    fp = params.as_float()
    if source == "closed":
        raw = float(closed_moment(fp, d, n, mode="float"))
    elif source == "recursion":
        raw = float(_float_table(fp, d, n).moment(d, n))
    else:
        raise ValueError(f"unknown source {source!r}")
    return ScaledMoment(n, d, _scale(raw, d, n, float(fp.a)))


@lru_cache(maxsize=64)
def _float_table(params: ErwParams, d: int, n_max: int) -> MomentTable:
    return moment_recursion(params, d, n_max, mode="float")


def scaled_moment_path(table: MomentTable, a: float, d: int, ns) -> np.ndarray:
    """E[L_n^d] at each n in ``ns``, read from one moment table."""
    a = float(a)
    return np.array([_scale(float(table.moment(d, n)), d, n, a) for n in ns])


def limit_moment(params: ErwParams, d: int) -> float:
    """Closed-form E[L^d] for d = 1..4."""
    a, b = float(params.a), float(params.b)
    if params.stops:
        raise DomainError("limit moments are for the standard walk")
    if not a > 0.5:
        raise DomainError(f"limit moments need a > 1/2, got a = {a}")
    G = lambda x: math.exp(log_gamma(x))
    if d == 1:
        return b / G(a + 1)
    if d == 2:
        return 1.0 / ((2 * a - 1) * G(2 * a))
    if d == 3:
        return b * (a + 1) / (a * (2 * a - 1) * G(3 * a))
    if d == 4:
        return 6 * (2 * a * a + 2 * a - 1) / ((4 * a - 1) * (2 * a - 1) ** 2 * G(4 * a))
    raise DomainError(f"closed limit moments exist for d = 1..4, got {d}")


def correction_exponents(a: float, d: int, count: int) -> list[float]:
    """Smallest ``count`` exponents e in E[L_n^d] = E[L^d] + sum c_e n^-e.

    The corrections come in powers n^-(J (2a-1) + m), J <= d/2, m >= 0.
    Coinciding exponents (e.g. integer 2a - 1) are merged.
    """
    lam = 2 * a - 1
    raw = sorted(J * lam + m for J in range(d // 2 + 1) for m in range(count + 1) if J or m)
    out: list[float] = []
    for e in raw:
        if not out or e - out[-1] > 1e-9:
            out.append(e)
    return out[:count]


def limit_moment_numeric(params: ErwParams, d: int, n_max: int = 10**5,
                         levels: int = 10, n_exponents: int = 6) -> float:
    """Extrapolate E[L^d] = lim E[L_n^d] from one float recursion to ``n_max``.

    Scaled moments are sampled at n_max, n_max/2, ..., n_max/2^(levels-1) and
    fitted by least squares to a constant plus the leading ``n_exponents``
    correction powers from :func:`correction_exponents`.
    """
    if params.stops:
        raise DomainError("limit moments are for the standard walk")
    if not params.superdiffusive:
        raise DomainError(f"limit moments need a > 1/2, got a = {params.a}")
    fp = params.as_float()
    if fp.p == 1.0:
        # every step repeats the first one, so L = X_1 exactly
        return 1.0 if d % 2 == 0 else float(fp.b)
    ns = [n_max >> i for i in range(levels)]
    if ns[-1] < 16:
        raise DomainError(f"n_max={n_max} too small for {levels} extrapolation levels")
    table = _float_table(fp, d, n_max)
    y = scaled_moment_path(table, fp.a, d, ns)
    exps = correction_exponents(float(fp.a), d, min(n_exponents, levels - 2))
    design = np.array([[1.0] + [n ** -e for e in exps] for n in ns])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(coef[0])
