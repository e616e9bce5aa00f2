"""Convergence diagnostics.

Prints (1) the number of terms and certified tail bound pfq_sum_z1 needs
for the slowest series of the general identity as the tolerance shrinks,
and (2) the rate at which the telescoping partial sums approach their limit.

    python3 scripts/tail_convergence.py --a 0.6 --d 4
"""

from __future__ import annotations

import math

import click

from erwhyp.identities import general_series, telescoping_term
from erwhyp.specfun import SeriesNotConverged, convergence_margin, log_gamma, pfq_sum_z1


@click.command()
@click.option("--a", type=float, default=0.6, show_default=True)
@click.option("--d", type=int, default=4, show_default=True)
def main(a, d):
    s = general_series(a, d, d - 2)
    click.echo(f"series {s}, margin {convergence_margin(s):g}")
    click.echo(f"{'abs_tol':>8} {'terms':>7} {'tail_bound':>11} {'value':>22}")
    for k in range(6, 16):
        tol = 10.0**-k
        try:
            v = pfq_sum_z1(s, abs_tol=tol)
        except SeriesNotConverged as exc:
            click.echo(f"{tol:>8.0e} not reached: {exc}")
            break
        click.echo(f"{tol:>8.0e} {v.terms_used:>7} {v.tail_bound:>11.2e} {v.value:>22.16f}")

    target = math.exp(d * log_gamma(a + 1) - log_gamma(a * d + 1)) - 1
    scale = math.exp(log_gamma(a * d + 1))
    click.echo("\ntelescoping partial sums, normalised by G(ad+1)")
    click.echo(f"{'N':>7} {'error':>12} {'local rate':>11}")
    total, prev, n_next = 0.0, None, 250
    for n in range(2, 16001):
        total += telescoping_term(a, d, n)[0]
        if n == n_next:
            err = total / scale - target
            rate = "" if prev is None else f"{math.log2(prev / err):11.4f}"
            click.echo(f"{n:>7} {err:>12.4e} {rate}")
            prev, n_next = err, 2 * n_next


if __name__ == "__main__":
    main()
