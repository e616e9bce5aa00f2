"""Residuals of every identity over the standard parameter grid.

    python3 scripts/identity_suite.py [--out residuals.csv]
"""

from __future__ import annotations

import csv
import sys
import time
from dataclasses import dataclass, field

import click

from erwhyp.identities import IdentityCase, evaluate


@dataclass
class SuiteConfig:
    a_grid: tuple[float, ...] = (0.6, 0.7, 0.75, 0.8, 0.9, 1.0, 1.5, 2.0)
    d_grid: tuple[int, ...] = (2, 3, 4, 5, 6)
    stops_a: tuple[float, ...] = (0.75, 1.0, 1.5)
    stops_b: tuple[float, ...] = (0.3, 0.5, 1.0, 1.2)
    kinds: tuple[str, ...] = field(default=("t1", "t2", "t3", "t4"))

    def cases(self):
        for kind in self.kinds:
            for a in self.a_grid:
                yield IdentityCase(kind, a)
        for a in self.a_grid:
            for d in self.d_grid:
                yield IdentityCase("general", a, d=d, tolerance=1e-6 if d >= 5 else 1e-7)
        for a in self.stops_a:
            for b in self.stops_b:
                if 2 * a > b:
                    yield IdentityCase("stops", a, b)


@click.command()
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV file (stdout if omitted).")
def main(out):
    cfg = SuiteConfig()
    t0 = time.perf_counter()
    rows = [evaluate(c).as_row() for c in cfg.cases()]
    elapsed = time.perf_counter() - t0
    handle = open(out, "w", newline="") if out else sys.stdout
    writer = csv.DictWriter(handle, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    if out:
        handle.close()
    worst = max(rows, key=lambda r: r["residual"])
    click.echo(f"{len(rows)} cases in {elapsed:.1f} s; all pass: {all(r['pass'] for r in rows)}; "
               f"worst residual {worst['residual']:.2e} ({worst['kind']}, a={worst['a']})", err=True)


if __name__ == "__main__":
    main()
