"""Command-line interface for erwhyp.

Usage:
    erwhyp identity --kind t1 --a 1 --tol 1e-8
    erwhyp sweep --kind general --a-grid 0.6,0.8,1 --d-grid 2,3,4
    erwhyp moments --p 4/5 --q 1 --d 2 --n-max 3
    erwhyp limit --p 0.9 --q 0.8 --d 4 --method all
    erwhyp simulate --p 0.85 --q 0.9 --n-steps 2000 --n-walks 20000 --seed 7

Every command writes CSV (default) or JSON (``--format json``) to stdout.
The exit code is 0 only when every reported case passes; domain and parse
errors exit nonzero with a message on stderr.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import resources

import click

from .identities import KINDS, IdentityCase, evaluate, identity_implied_moment
from .moments import ErwParams, closed_moment, limit_moment, limit_moment_numeric, moment_recursion
from .montecarlo import SimConfig, default_workers, simulate
from .specfun import DomainError, SeriesNotConverged

__all__ = ["cli", "main", "load_schema", "IDENTITY_COLUMNS", "MOMENT_COLUMNS", "LIMIT_COLUMNS", "SIMULATE_COLUMNS"]

IDENTITY_COLUMNS = ("kind", "a", "b", "d", "lhs", "rhs", "residual", "tail_bound", "terms", "pass")
MOMENT_COLUMNS = ("n", "k", "value")
LIMIT_COLUMNS = ("d", "method", "value")
SIMULATE_COLUMNS = ("d", "mean_S", "stderr_S", "mean_L", "stderr_L", "n_walks")
FORMATS = click.Choice(["csv", "json"])


def load_schema(command: str | None = None) -> dict:
    """JSON schema of a command's ``--format json`` output (the full document if None)."""
    doc = json.loads(resources.files("erwhyp").joinpath("report_schema.json").read_text())
    if command is None:
        return doc
    return {"$defs": doc["$defs"], **doc["commands"][command]}


def _real(text: str) -> float:
    """Float from "0.75" or "3/4"."""
    try:
        return float(Fraction(text.strip())) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(f"not a number: {text!r}") from exc


def _grid(text: str, conv=_real) -> list:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise click.BadParameter("empty grid")
    return [conv(t) for t in items]


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise click.BadParameter(f"not an integer: {text!r}") from exc


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    return v


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def _emit(rows: list[dict], columns, fmt: str, document=None) -> None:
    rows = [{c: _clean(r[c]) for c in columns} for r in rows]
    if fmt == "json":
        payload = rows if document is None else document(rows)
        click.echo(json.dumps(payload, indent=2))
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_csv_cell(r[c]) for c in columns])
    click.echo(buf.getvalue(), nl=False)


def _guarded(func):
    """Turn module errors into a message and exit status 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (DomainError, SeriesNotConverged, OverflowError, ZeroDivisionError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _run_cases(cases: list[IdentityCase]):
    workers = default_workers()
    if workers > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(cases))) as pool:
            return list(pool.map(evaluate, cases))
    return [evaluate(c) for c in cases]


def _finish_identity(reports, fmt):
    _emit([r.as_row() for r in reports], IDENTITY_COLUMNS, fmt)
    if not all(r.passed for r in reports):
        sys.exit(1)


def _default_tol(kind, d, tol):
    if tol is not None:
        return tol
    return 1e-6 if kind == "general" and d is not None and d >= 5 else 1e-7


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Elephant random walk moments and hypergeometric identities."""


@cli.command()
@click.option("--kind", required=True, type=click.Choice(KINDS))
@click.option("--a", "a", required=True, type=str, help="a = 2p - 1 (decimal or num/den).")
@click.option("--b", "b", type=str, default=None, help="Second parameter of the stops identity.")
@click.option("--d", "d", type=int, default=None, help="Order of the general identity.")
@click.option("--tol", type=float, default=None, help="Residual tolerance (default 1e-7; 1e-6 for general d >= 5).")
@click.option("--format", "fmt", type=FORMATS, default="csv")
@_guarded
def identity(kind, a, b, d, tol, fmt):
    """Evaluate both sides of one identity."""
    case = IdentityCase(kind, _real(a), None if b is None else _real(b), d, _default_tol(kind, d, tol))
    _finish_identity(_run_cases([case]), fmt)


@cli.command()
@click.option("--kind", required=True, type=click.Choice(KINDS))
@click.option("--a-grid", default="0.6,0.7,0.75,0.8,0.9,1.0,1.5,2.0", show_default=True)
@click.option("--b-grid", default="0.3,0.5,1,1.2", show_default=True, help="Used by the stops identity only.")
@click.option("--d-grid", default="2,3,4,5,6", show_default=True, help="Used by the general identity only.")
@click.option("--tol", type=float, default=None)
@click.option("--format", "fmt", type=FORMATS, default="csv")
@_guarded
def sweep(kind, a_grid, b_grid, d_grid, tol, fmt):
    """Evaluate one identity over a parameter grid.

    For the stops identity, (a, b) pairs with 2a <= b are skipped.
    """
    cases = []
    for a in _grid(a_grid):
        if kind == "general":
            for d in _grid(d_grid, _int):
                cases.append(IdentityCase(kind, a, None, d, _default_tol(kind, d, tol)))
        elif kind == "stops":
            for b in _grid(b_grid):
                if 2 * a > b:
                    cases.append(IdentityCase(kind, a, b, None, _default_tol(kind, None, tol)))
        else:
            cases.append(IdentityCase(kind, a, None, None, _default_tol(kind, None, tol)))
    if not cases:
        raise DomainError("the grid contains no admissible case")
    _finish_identity(_run_cases(cases), fmt)


def _params(p, q, r, s) -> ErwParams:
    return ErwParams(p, q, r, s)


def _number(text: str):
    """Rationals for "num/den" and integers, floats for decimals."""
    text = text.strip()
    try:
        return Fraction(text) if "/" in text or text.lstrip("-").isdigit() else float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(f"not a number: {text!r}") from exc


@cli.command()
@click.option("--p", required=True)
@click.option("--q", required=True)
@click.option("--r", default="0", show_default=True, help="Stop probability (needs --s).")
@click.option("--s", default=None, help="First-step probability of the walk with stops.")
@click.option("--d", type=int, required=True, help="Highest moment order.")
@click.option("--n-max", type=int, required=True)
@click.option("--mode", type=click.Choice(["auto", "exact", "float"]), default="auto",
              help="auto: exact when every parameter is rational.")
@click.option("--source", type=click.Choice(["recursion", "closed"]), default="recursion")
@click.option("--format", "fmt", type=FORMATS, default="csv")
@_guarded
def moments(p, q, r, s, d, n_max, mode, source, fmt):
    """Table of E[S_n^k] for k <= d and n <= n-max."""
    params = _params(_number(p), _number(q), _number(r), None if s is None else _number(s))
    if mode == "auto":
        mode = "exact" if params.exact else "float"
    if mode == "exact" and not params.exact:
        raise DomainError("exact mode needs rational inputs written as integers or num/den")
    rows = []
    if source == "recursion":
        table = moment_recursion(params, d, n_max, mode)
        for n in range(1, n_max + 1):
            for k in range(1, d + 1):
                rows.append({"n": n, "k": k, "value": table.moment(k, n)})
    else:
        for n in range(1, n_max + 1):
            for k in range(2, d + 1):
                rows.append({"n": n, "k": k, "value": closed_moment(params, k, n, mode)})
    _emit(rows, MOMENT_COLUMNS, fmt)


@cli.command()
@click.option("--p", required=True)
@click.option("--q", required=True)
@click.option("--d", type=int, required=True)
@click.option("--method", type=click.Choice(["closed", "identity", "numeric", "all"]), default="closed")
@click.option("--n-max", type=int, default=10**5, show_default=True, help="Recursion length for --method numeric.")
@click.option("--format", "fmt", type=FORMATS, default="csv")
@_guarded
def limit(p, q, d, method, n_max, fmt):
    """Limiting moment E[L^d] of the superdiffusive walk."""
    params = ErwParams(_number(p), _number(q))
    methods = ["closed", "identity", "numeric"] if method == "all" else [method]
    rows = []
    for m in methods:
        if m == "closed":
            v = limit_moment(params, d)
        elif m == "identity":
            if not params.superdiffusive:
                raise DomainError(f"limit moments need a > 1/2, got a = {params.a}")
            v = identity_implied_moment(float(params.a), float(params.b), d)
        else:
            v = limit_moment_numeric(params, d, n_max=n_max)
        rows.append({"d": d, "method": m, "value": v})
    _emit(rows, LIMIT_COLUMNS, fmt)


@cli.command("simulate")
@click.option("--p", required=True)
@click.option("--q", required=True)
@click.option("--r", default="0", show_default=True)
@click.option("--s", default=None)
@click.option("--n-steps", type=int, required=True)
@click.option("--n-walks", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--orders", default="1,2,3,4", show_default=True)
@click.option("--format", "fmt", type=FORMATS, default="csv")
@_guarded
def simulate_cmd(p, q, r, s, n_steps, n_walks, seed, orders, fmt):
    """Monte Carlo moments of S_n and L_n.

    Worker processes are taken from ERW_WORKERS; the output does not depend on it.
    """
    params = _params(_number(p), _number(q), _number(r), None if s is None else _number(s))
    cfg = SimConfig(params, n_steps, n_walks, seed, tuple(_grid(orders, _int)))
    res = simulate(cfg)
    _emit(res.rows(), SIMULATE_COLUMNS, fmt,
          document=lambda rows: {"seed": res.seed, "config": res.config, "moments": rows})


def main(argv=None):
    cli.main(args=argv, prog_name="erwhyp")


if __name__ == "__main__":
    main()
