"""Seeded Monte Carlo simulation of the elephant random walk.

Walks are simulated in blocks of ``block_size`` columns with numpy.  Block
``i`` draws from ``Generator(Philox(SeedSequence([seed, i])))``, so the
output depends only on the configuration and the seed, never on how many
worker processes shared the blocks.

Neither mode stores history.  The standard walk needs only S_n, because
P(X_{n+1} = +1 | past) = (1 + a S_n / n) / 2.  The walk with stops needs only
(S_n, Z_n), where Z_n counts the zero steps: the counts of +1 and -1 steps
are then (n - Z_n +/- S_n) / 2.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .moments import ErwParams
from .specfun import DomainError, log_gamma_ratio

__all__ = ["SimConfig", "SimResult", "simulate", "empirical_moment", "default_workers", "l_scale"]

BLOCK_SIZE = 4096


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    The first step is +1 with probability ``params.first_step``
    (``q`` for the standard walk, ``s`` for the walk with stops).
    """

    params: ErwParams
    n_steps: int
    n_walks: int
    seed: int = 0
    moment_orders: tuple[int, ...] = (1, 2, 3, 4)
    block_size: int = BLOCK_SIZE

    def __post_init__(self):
        object.__setattr__(self, "moment_orders", tuple(int(d) for d in self.moment_orders))
        if self.n_steps < 1:
            raise DomainError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.n_walks < 1:
            raise DomainError(f"n_walks must be >= 1, got {self.n_walks}")
        if not self.moment_orders or min(self.moment_orders) < 1:
            raise DomainError(f"moment_orders must be non-empty with entries >= 1, got {self.moment_orders}")
        if self.block_size < 1:
            raise DomainError("block_size must be positive")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    def echo(self) -> dict:
        pr = self.params
        return {
            "p": float(pr.p), "q": float(pr.q), "r": float(pr.r),
            "s": None if pr.s is None else float(pr.s),
            "n_steps": self.n_steps, "n_walks": self.n_walks, "seed": self.seed,
            "moment_orders": list(self.moment_orders), "block_size": self.block_size,
        }


@dataclass(frozen=True)
class SimResult:
    orders: tuple[int, ...]
    mean_s: tuple[float, ...]
    stderr_s: tuple[float, ...]
    mean_l: tuple[float, ...]
    stderr_l: tuple[float, ...]
    n_walks: int
    seed: int
    config: dict
    samples: np.ndarray = field(repr=False, compare=False)  # final S_n per walk, in walk order

    def rows(self) -> list[dict]:
        return [
            {"d": d, "mean_S": ms, "stderr_S": es, "mean_L": ml, "stderr_L": el, "n_walks": self.n_walks}
            for d, ms, es, ml, el in zip(self.orders, self.mean_s, self.stderr_s, self.mean_l, self.stderr_l)
        ]

    def to_dict(self) -> dict:
        return {"seed": self.seed, "config": self.config, "moments": self.rows()}


def empirical_moment(samples, d: int) -> tuple[float, float]:
    """Sample mean of ``samples**d`` and its standard error.

    Parameters
    ----------
    samples : array_like
        At least two observations.
    d : int
        Power.

    Returns
    -------
    mean, stderr : float
        ``stderr`` uses the ``ddof=1`` standard deviation over ``sqrt(n)``.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("empirical_moment needs at least two samples")
    y = x**d
    mean = float(np.mean(y))
    sd = float(np.std(y, ddof=1))
    return mean, sd / math.sqrt(y.size)


def l_scale(n: int, a: float) -> float:
    """Factor turning S_n into L_n: a_n / G(a+1) = G(n) / G(n+a)."""
    if a == 1:
        return 1.0 / n
    if a == 0:
        return 1.0
    if a == -1:
        return float(n - 1)
    return math.exp(-log_gamma_ratio(n, a))


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ERW_WORKERS", "1")))
    except ValueError as exc:
        raise DomainError("ERW_WORKERS must be a positive integer") from exc


def _probabilities(params: ErwParams):
    pr = params.as_float() if params.exact else params
    return float(pr.p), float(pr.q), float(pr.first_step), float(pr.a), pr.stops


def _run_block(params: ErwParams, n_steps: int, width: int, seed: int, index: int) -> np.ndarray:
    p, q, first, a, stops = _probabilities(params)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))
    s = np.where(rng.random(width) < first, 1, -1).astype(np.int64)
    if not stops:
        for n in range(1, n_steps):
            up = rng.random(width) < 0.5 * (1.0 + a * s / n)
            s += 2 * up.astype(np.int64) - 1
        return s
    z = np.zeros(width, dtype=np.int64)
    for n in range(1, n_steps):
        plus = 0.5 * (n - z + s)
        minus = 0.5 * (n - z - s)
        p_up = (p * plus + q * minus) / n
        p_down = (q * plus + p * minus) / n
        u = rng.random(width)
        up = u < p_up
        down = ~up & (u < p_up + p_down)
        s += up.astype(np.int64) - down.astype(np.int64)
        z += (~up & ~down).astype(np.int64)
    return s


def _job(args):
    return _run_block(*args)


def simulate(config: SimConfig, workers: int | None = None) -> SimResult:
    """Simulate ``config.n_walks`` walks of ``config.n_steps`` steps.

    ``workers`` defaults to the ``ERW_WORKERS`` environment variable (1 if
    unset).  The result is identical for any worker count.
    """
    workers = default_workers() if workers is None else max(1, int(workers))
    bs = config.block_size
    n_blocks = -(-config.n_walks // bs)
    jobs = [
        (config.params, config.n_steps, min(bs, config.n_walks - i * bs), config.seed, i)
        for i in range(n_blocks)
    ]
    if workers > 1 and n_blocks > 1:
        with ProcessPoolExecutor(max_workers=min(workers, n_blocks)) as pool:
            blocks = list(pool.map(_job, jobs))
    else:
        blocks = [_job(j) for j in jobs]
    samples = np.concatenate(blocks)

    a = float(config.params.a)
    lfac = l_scale(config.n_steps, a)
    ls = samples * lfac
    ms, es, ml, el = [], [], [], []
    for d in config.moment_orders:
        if samples.size >= 2:
            m, e = empirical_moment(samples, d)
            m2, e2 = empirical_moment(ls, d)
        else:
            m, e = float(samples[0]) ** d, 0.0
            m2, e2 = float(ls[0]) ** d, 0.0
        ms.append(m)
        es.append(e)
        ml.append(m2)
        el.append(e2)
    return SimResult(
        orders=config.moment_orders, mean_s=tuple(ms), stderr_s=tuple(es),
        mean_l=tuple(ml), stderr_l=tuple(el), n_walks=config.n_walks,
        seed=config.seed, config=config.echo(), samples=samples,
    )
