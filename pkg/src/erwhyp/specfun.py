"""Real log-Gamma, Pochhammer symbols and generalized hypergeometric sums at z = 1.

``log_gamma`` is piecewise:

* ``x < 0.5``: reflection-free shift, ln G(x) = ln G(x + 1) - ln x;
* ``0.5 <= x < 1.5``: Taylor series of ln G(1 + z) with zeta(k) coefficients;
* ``1.5 <= x < 2.5``: Taylor series of ln G(2 + z) with zeta(k) - 1 coefficients;
* ``2.5 <= x < 20``: downward recurrence into [1.5, 2.5) (all log terms positive);
* ``x >= 20``: Stirling series with seven Bernoulli corrections.

The two Taylor pieces keep the result relatively accurate next to the zeros at
x = 1 and x = 2, where the C library ``lgamma`` only has absolute accuracy.

``log_gamma_ratio`` evaluates ln G(x + h) - ln G(x) without the cancellation a
difference of two log-Gamma calls suffers for large ``x``: arguments are
shifted upward to at least 20 with ``log1p`` corrections, then the difference
of two Stirling series is taken in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._tail import build_bracket

__all__ = [
    "DomainError",
    "SeriesNotConverged",
    "HypSeries",
    "SeriesValue",
    "log_gamma",
    "log_gamma_ratio",
    "pochhammer",
    "convergence_margin",
    "pfq_sum_z1",
    "gauss_2f1_oracle",
]

DEFAULT_ABS_TOL = 1e-10
DEFAULT_MAX_TERMS = 10**7

# B_{2k} / (2k (2k - 1)) for k = 1..7
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)
_STIRLING_MIN = 20.0
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_EULER_GAMMA = 0.57721566490153286061


def _zeta_minus_one(k: int, n_direct: int = 100) -> float:
    """zeta(k) - 1 for integer k >= 2 by direct summation plus Euler-Maclaurin tail."""
    head = math.fsum(n ** -k for n in range(2, n_direct))
    N = float(n_direct)
    tail = (N ** (1 - k) / (k - 1) + 0.5 * N ** -k + k * N ** (-k - 1) / 12.0
            - k * (k + 1) * (k + 2) * N ** (-k - 3) / 720.0
            + k * (k + 1) * (k + 2) * (k + 3) * (k + 4) * N ** (-k - 5) / 30240.0)
    return head + tail


_ZETA_M1 = tuple(_zeta_minus_one(k) for k in range(2, 64))  # index k - 2

_EPS64 = np.finfo(np.float64).eps
_EPS_LD = np.finfo(np.longdouble).eps


class DomainError(ValueError):
    """Argument outside the domain where an operation is defined."""


class SeriesNotConverged(RuntimeError):
    """Raised when ``max_terms`` is reached before the tail bound meets tolerance."""

    def __init__(self, message: str, best: "SeriesValue"):
        super().__init__(message)
        self.best = best


def _lgamma_near_one(z: float) -> float:
    # ln G(1 + z) = -gamma z + sum_{k>=2} (-1)^k zeta(k) z^k / k,  |z| <= 1/2
    terms = [-_EULER_GAMMA * z]
    zk = -z  # (-z)**k after the first update
    for k, zm1 in enumerate(_ZETA_M1, start=2):
        zk *= -z
        term = (1.0 + zm1) * zk / k
        terms.append(term)
        if abs(term) < 1e-18 * abs(terms[0]):
            break
    return math.fsum(terms)


def _lgamma_near_two(z: float) -> float:
    # ln G(2 + z) = (1 - gamma) z + sum_{k>=2} (-1)^k (zeta(k) - 1) z^k / k,  |z| <= 1/2
    terms = [(1.0 - _EULER_GAMMA) * z]
    zk = -z  # (-z)**k after the first update
    for k, zm1 in enumerate(_ZETA_M1, start=2):
        zk *= -z
        term = zm1 * zk / k
        terms.append(term)
        if abs(term) < 1e-18 * abs(terms[0]):
            break
    return math.fsum(terms)


def _lgamma_stirling(x: float) -> float:
    xi = 1.0 / x
    x2 = xi * xi
    corr, xp = 0.0, xi
    for c in _STIRLING:
        corr += c * xp
        xp *= x2
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + corr


def log_gamma(x: float) -> float:
    """ln Gamma(x) for real x > 0, relative error below 1e-13 on (0, 1e4]."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    if x == 1.0 or x == 2.0:
        return 0.0
    if x < 0.5:
        return _lgamma_near_one(x) - math.log(x)
    if x < 1.5:
        return _lgamma_near_one(x - 1.0)
    if x < 2.5:
        return _lgamma_near_two(x - 2.0)
    if x < _STIRLING_MIN:
        m = math.floor(x - 1.5)
        y = x - m
        return math.fsum([_lgamma_near_two(y - 2.0)] + [math.log(y + j) for j in range(m)])
    return _lgamma_stirling(x)


def _stirling_diff(y: float, h: float) -> float:
    z = y + h
    main = (y - 0.5) * math.log1p(h / y) + h * math.log(z) - h
    corr = 0.0
    zi, yi = 1.0 / z, 1.0 / y
    z2, y2 = zi * zi, yi * yi
    zp, yp = zi, yi
    for c in _STIRLING:
        corr += c * (zp - yp)
        zp *= z2
        yp *= y2
    return main + corr


def log_gamma_ratio(x: float, h: float) -> float:
    """ln Gamma(x + h) - ln Gamma(x), accurate to a few ulps of the result.

    Requires x > 0 and x + h > 0.
    """
    x, h = float(x), float(h)
    if not (x > 0.0 and x + h > 0.0):
        raise DomainError(f"log_gamma_ratio requires x > 0 and x + h > 0, got x={x!r}, h={h!r}")
    if h == 0.0:
        return 0.0
    low = min(x, x + h)
    shift = max(0, math.ceil(_STIRLING_MIN - low))
    if shift == 0:
        return _stirling_diff(x, h)
    lower = [math.log1p(h / (x + j)) for j in range(shift)]
    return math.fsum([_stirling_diff(x + shift, h)] + [-v for v in lower])


def pochhammer(a, n: int):
    """Rising factorial (a)_n = a (a+1) ... (a+n-1); exact for int/Fraction ``a``."""
    if n < 0:
        raise DomainError(f"pochhammer requires n >= 0, got {n}")
    out = 1
    for k in range(n):
        out *= a + k
    return out


@dataclass(frozen=True)
class HypSeries:
    """{}_{p+1}F_p(num_params; den_params; 1)."""

    num_params: tuple[float, ...]
    den_params: tuple[float, ...]

    def __post_init__(self):
        num = tuple(float(x) for x in self.num_params)
        den = tuple(float(x) for x in self.den_params)
        object.__setattr__(self, "num_params", num)
        object.__setattr__(self, "den_params", den)
        if len(num) != len(den) + 1:
            raise DomainError(f"expected p+1 numerator and p denominator parameters, got {len(num)} and {len(den)}")
        if any(not x >= 0.0 for x in num) or any(not x > 0.0 for x in den):
            raise DomainError(f"parameters must be positive: {num}; {den}")
        if not convergence_margin(self) > 0.0:
            raise DomainError(f"series diverges at z=1: margin {convergence_margin(self):g} <= 0")

    def reduced(self) -> "HypSeries":
        """Drop numerator/denominator pairs that cancel exactly."""
        num = list(self.num_params)
        den = []
        for b in self.den_params:
            if b in num:
                num.remove(b)
            else:
                den.append(b)
        return HypSeries(tuple(sorted(num)), tuple(sorted(den)))

    def __str__(self):
        p = len(self.den_params)
        fmt = lambda xs: ",".join(f"{x:g}" for x in xs)
        return f"{p + 1}F{p}({fmt(self.num_params)}; {fmt(self.den_params)}; 1)"


@dataclass(frozen=True)
class SeriesValue:
    value: float
    tail_bound: float
    terms_used: int


def convergence_margin(s: HypSeries) -> float:
    """Sum of denominator parameters minus sum of numerator parameters."""
    return math.fsum(s.den_params) - math.fsum(s.num_params)


def _ratio_block(num, den, k):
    r = np.ones_like(k)
    for a in num:
        r *= k + a
    for b in den:
        r /= k + b
    return r / (k + 1)


def _rounding_allowance(n: int, p: int, total: float) -> float:
    # cumulative product and sum in long double, final rounding to double
    return abs(total) * (n * (2 * p + 6) * float(_EPS_LD) + 4 * float(_EPS64))


def pfq_sum_z1(s: HypSeries, abs_tol: float = DEFAULT_ABS_TOL,
               max_terms: int = DEFAULT_MAX_TERMS, n_terms: int | None = None) -> SeriesValue:
    """Sum a {}_{p+1}F_p series at z = 1 with a certified truncation bound.

    Terms are generated by the forward ratio recurrence in long double.  After
    N terms the remaining tail is bracketed by two comparison sequences (see
    ``_tail``); the returned value is the partial sum plus the bracket midpoint
    and ``tail_bound`` covers the half width plus a rounding allowance.

    ``n_terms`` forces the stopping index instead of searching for the first
    one meeting ``abs_tol``.
    """
    if not abs_tol > 0:
        raise DomainError("abs_tol must be positive")
    if any(a == 0.0 for a in s.num_params):
        return SeriesValue(1.0, 0.0, 1)
    r = s.reduced()
    return _sum_reduced(r.num_params, r.den_params, float(abs_tol), int(max_terms), n_terms)


@lru_cache(maxsize=4096)
def _sum_reduced(num, den, abs_tol, max_terms, n_terms) -> SeriesValue:
    p = len(den)
    bracket = build_bracket(num, den)
    if not bracket.deltas:
        raise SeriesNotConverged(f"no certifiable tail for {num}; {den}", SeriesValue(math.nan, math.inf, 0))
    deltas = np.array(bracket.deltas, dtype=np.longdouble)
    starts = np.array(bracket.starts)
    K = bracket.order
    stop_at = n_terms if n_terms is not None else max_terms

    t_first = np.longdouble(1.0)  # t_{n0}
    running = np.longdouble(0.0)  # sum_{k < n0} t_k
    n0 = 0
    block = 256
    best = SeriesValue(math.nan, math.inf, 0)
    while n0 < stop_at:
        size = min(block, stop_at - n0 + 1)
        k = np.arange(n0, n0 + size, dtype=np.longdouble)
        ratios = _ratio_block(num, den, k)
        t = np.empty(size + 1, dtype=np.longdouble)
        t[0] = t_first
        t[1:] = t_first * np.cumprod(ratios)
        t = t[:size]  # t_{n0} .. t_{n0+size-1}
        prefix = running + np.concatenate(([np.longdouble(0.0)], np.cumsum(t[:-1])))
        idx = np.arange(n0, n0 + size)

        if n_terms is not None:
            sel = np.nonzero(idx == n_terms)[0]
            if sel.size:
                i = int(sel[0])
                return _finish(num, den, bracket, deltas, starts, idx[i], t[i], prefix[i], p, abs_tol=None)
        else:
            with np.errstate(divide="ignore"):
                nk = np.maximum(idx, 1).astype(np.longdouble) ** K
            widths = np.full(size, np.inf, dtype=np.longdouble)
            for j in range(len(deltas)):
                ok = idx >= starts[j]
                if ok.any():
                    widths = np.where(ok, np.minimum(widths, t * deltas[j] / nk), widths)
            scale = float(prefix[-1] + t[-1] * (idx[-1] + 1))
            allowance = _rounding_allowance(n0 + size, p, scale)
            bounds = widths + allowance
            hit = np.nonzero(bounds <= abs_tol)[0]
            if hit.size:
                i = int(hit[0])
                return _finish(num, den, bracket, deltas, starts, idx[i], t[i], prefix[i], p, abs_tol)
            i = size - 1
            if np.isfinite(widths[i]):
                best = _finish(num, den, bracket, deltas, starts, idx[i], t[i], prefix[i], p, abs_tol=None)
            if allowance > abs_tol:
                raise SeriesNotConverged(
                    f"abs_tol={abs_tol:g} is below the rounding floor {allowance:.3g} for {num}; {den}", best)

        running = prefix[-1] + t[-1]
        t_first = t[-1] * ratios[-1]
        n0 += size
        block = min(block * 2, 1 << 17)

    if n_terms is not None:
        raise SeriesNotConverged(f"n_terms={n_terms} not reachable", best)
    raise SeriesNotConverged(
        f"max_terms={max_terms} reached for {num}; {den} with tail bound {best.tail_bound:.3g} > {abs_tol:g}", best)


def _finish(num, den, bracket, deltas, starts, n, t_n, partial, p, abs_tol):
    n = int(n)
    ok = [j for j in range(len(deltas)) if starts[j] <= n]
    if not ok:
        raise SeriesNotConverged(
            f"tail bracket not certified at n={n} (needs n >= {starts[0]})", SeriesValue(math.nan, math.inf, n))
    delta = min(float(deltas[j]) for j in ok)
    t_n = float(t_n)
    value = float(partial) + t_n * bracket.estimate_factor(n)
    half_width = t_n * delta / float(n) ** bracket.order
    bound = half_width + _rounding_allowance(n, p, value)
    return SeriesValue(value, bound, max(n, 1))


def gauss_2f1_oracle(a: float, b: float, c: float) -> float:
    """Gauss summation: 2F1(a, b; c; 1) = G(c) G(c-a-b) / (G(c-a) G(c-b))."""
    if not (c > 0 and c - a - b > 0):
        raise DomainError(f"Gauss summation needs c > 0 and c - a - b > 0, got a={a}, b={b}, c={c}")
    if a == 0 or b == 0:
        return 1.0
    return math.exp(log_gamma(c) + log_gamma(c - a - b) - log_gamma(c - a) - log_gamma(c - b))
