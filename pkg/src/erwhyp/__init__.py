"""Elephant random walk moments and the hypergeometric identities they imply.

Modules
-------
specfun
    log-Gamma, Pochhammer symbols, unit-argument pFq sums with certified tails.
moments
    Exact and float moment recursions, closed forms, limiting moments.
identities
    Both sides of each hypergeometric identity, with residual reports.
montecarlo
    Seeded reproducible simulation of the walk, with and without stops.
cli
    The ``erwhyp`` command.
"""

from .identities import IdentityCase, IdentityReport, evaluate
from .moments import ErwParams, MomentTable, closed_moment, limit_moment, limit_moment_numeric, moment_recursion
from .montecarlo import SimConfig, SimResult, simulate
from .specfun import DomainError, HypSeries, SeriesNotConverged, log_gamma, pfq_sum_z1

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "SeriesNotConverged",
    "HypSeries",
    "log_gamma",
    "pfq_sum_z1",
    "ErwParams",
    "MomentTable",
    "moment_recursion",
    "closed_moment",
    "limit_moment",
    "limit_moment_numeric",
    "IdentityCase",
    "IdentityReport",
    "evaluate",
    "SimConfig",
    "SimResult",
    "simulate",
]
