"""Monte Carlo moments against the exact recursion.

    python3 scripts/mc_vs_recursion.py            # n = 2000, 2e4 walks
    python3 scripts/mc_vs_recursion.py --large    # n = 1e4, 1e5 walks, E[L_n^2]
"""

from __future__ import annotations

from dataclasses import dataclass

import click

from erwhyp.moments import ErwParams, moment_recursion, scaled_moment
from erwhyp.montecarlo import SimConfig, simulate


@dataclass
class Experiment:
    p: float = 0.85
    q: float = 0.9
    n_steps: int = 2000
    n_walks: int = 20000
    seed: int = 20240601


@click.command()
@click.option("--large", is_flag=True, help="Longer walks; checks E[L_n^2] against the scaled recursion.")
@click.option("--seed", type=int, default=20240601, show_default=True)
def main(large, seed):
    exp = Experiment(n_steps=10**4, n_walks=10**5, seed=seed) if large else Experiment(seed=seed)
    params = ErwParams(exp.p, exp.q)
    res = simulate(SimConfig(params, exp.n_steps, exp.n_walks, exp.seed))
    table = moment_recursion(params, 4, exp.n_steps, mode="float")
    click.echo(f"p={exp.p} q={exp.q} n={exp.n_steps} walks={exp.n_walks} seed={exp.seed}")
    click.echo(f"{'d':>2} {'empirical E[S^d]':>20} {'exact':>20} {'z':>7}")
    for d, m, e in zip(res.orders, res.mean_s, res.stderr_s):
        ex = table.moment(d, exp.n_steps)
        click.echo(f"{d:>2} {m:>20.8g} {ex:>20.8g} {(m - ex) / e:>+7.2f}")
    target = scaled_moment(params, 2, exp.n_steps).value
    z = (res.mean_l[1] - target) / res.stderr_l[1]
    click.echo(f"E[L_n^2]: empirical {res.mean_l[1]:.6g} +- {res.stderr_l[1]:.2g}, exact {target:.6g}, z {z:+.2f}")


if __name__ == "__main__":
    main()
