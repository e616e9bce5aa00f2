"""Certified tail brackets for hypergeometric series at unit argument.

For the series sum_n t_n with t_{n+1}/t_n = Num(n)/Den(n), where

    Num(n) = prod_i (n + a_i),      Den(n) = (n + 1) prod_j (n + b_j),

we look for a comparison function R(n) = U(n)/n**K (U of degree K + 1) with

    t_n R(n) - t_{n+1} R(n+1) = t_n (1 + E(n)),     E(n) = O(n**-(K+2)).

Summing from N to infinity gives T_N = t_N R(N) - sum_{n>=N} t_n E(n).
Perturbing the constant coefficient of U by +delta (resp. -delta) makes
E(n) eventually positive (resp. negative); once the sign holds on the whole
half line [N, inf) the perturbed R(N) t_N is an upper (resp. lower) bound
of the tail.  The sign is verified exactly: every parameter is converted to
a Fraction, the residual polynomial is scaled to integer coefficients and
Taylor-shifted to N, and all shifted coefficients must share the sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

Poly = list  # coefficients, lowest degree first


def _mul(a: Poly, b: Poly) -> Poly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _axpy(y: Poly, c: Fraction, x: Poly) -> Poly:
    """Return y + c*x."""
    n = max(len(x), len(y))
    out = list(y) + [Fraction(0)] * (n - len(y))
    for i, v in enumerate(x):
        out[i] += c * v
    return out


def _from_roots(shifts) -> Poly:
    """Coefficients of prod (x + c) over c in shifts."""
    out = [Fraction(1)]
    for c in shifts:
        out = _mul(out, [Fraction(c), Fraction(1)])
    return out


def _monomial(m: int) -> Poly:
    return [Fraction(0)] * m + [Fraction(1)]


def _to_int(poly: Poly) -> list[int]:
    den = 1
    for c in poly:
        den = math.lcm(den, c.denominator)
    return [int(c * den) for c in poly]


def _taylor_shift(coeffs: list[int], h: int) -> list[int]:
    a = list(coeffs)
    n = len(a)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += h * a[j + 1]
    return a


def _sign_holds(coeffs: list[int], h: int, sign: int) -> bool:
    shifted = _taylor_shift(coeffs, h)
    if sign > 0:
        return all(c >= 0 for c in shifted)
    return all(c <= 0 for c in shifted)


def _first_certified(coeffs: list[int], sign: int, limit: int) -> int | None:
    """Smallest N >= 1 with the sign of poly(N + x) fixed on x >= 0.

    Monotone in N: shifting a polynomial whose coefficients share a sign by
    a positive amount preserves that property.
    """
    if _sign_holds(coeffs, 1, sign):
        return 1
    hi = 2
    while not _sign_holds(coeffs, hi, sign):
        hi *= 2
        if hi > limit:
            return None
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _sign_holds(coeffs, mid, sign):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class TailBracket:
    order: int
    u: tuple[Fraction, ...]
    deltas: tuple[float, ...]
    starts: tuple[int, ...]  # certified start index for each delta, increasing

    def estimate_factor(self, n: int) -> float:
        """R(n) for the unperturbed comparison function, so that T_n ~ t_n R(n)."""
        x = Fraction(n)
        val = Fraction(0)
        for c in reversed(self.u):
            val = val * x + c
        return float(val / x**self.order)


@lru_cache(maxsize=4096)
def build_bracket(num: tuple[float, ...], den: tuple[float, ...], order: int = 4,
                  n_deltas: int = 8, limit: int = 2**34) -> TailBracket:
    K = order
    A = [Fraction(x) for x in num]
    B = [Fraction(x) for x in den]
    p = len(B)
    Num = _from_roots(A)
    Den = _from_roots(B + [Fraction(1)])
    W0 = _monomial(K)
    W1 = _from_roots([1] * K)

    def L(m: int) -> Poly:
        left = _mul(_mul(Den, _monomial(m)), W1)
        right = _mul(_mul(Num, _from_roots([1] * m)), W0)
        return _axpy(left, Fraction(-1), right)

    Ls = [L(m) for m in range(K + 2)]
    P = [-c for c in _mul(_mul(Den, W0), W1)]
    u = [Fraction(0)] * (K + 2)
    for m in range(K + 1, -1, -1):
        deg = p + K + m
        coef = P[deg] if deg < len(P) else Fraction(0)
        u[m] = -coef / Ls[m][deg]
        P = _axpy(P, u[m], Ls[m])

    scale = max(1.0, abs(float(u[0])))
    top = math.floor(math.log2(scale))
    deltas, starts = [], []
    for j in range(n_deltas):
        delta = Fraction(2) ** (top - 4 * j)
        hi = _first_certified(_to_int(_axpy(P, delta, Ls[0])), +1, limit)
        lo = _first_certified(_to_int(_axpy(P, -delta, Ls[0])), -1, limit)
        if hi is None or lo is None:
            break
        deltas.append(float(delta))
        starts.append(max(hi, lo))
    return TailBracket(K, tuple(u), tuple(deltas), tuple(starts))
