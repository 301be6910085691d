"""
Forced oscillations and the limit cycle
=======================================

lambda = delta = omega = omega0 = b = 1, zero initial data, T = 100,
N = 1800 and q(t) = 0.8 - t/200. After the transient both schemes settle on
a periodic orbit driven by the cos(t) forcing.

Usage: python demos/02_limit_cycle.py [output_dir]
"""

import sys
from pathlib import Path

import numpy as np

from fracduffing import abm_solve, efds_solve, example_problem
from fracduffing.io import atomic_write_text, write_trajectory
from fracduffing.plotting import plot_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

problem = example_problem(T=100.0)
grid = problem.grid(1800)
runs = [solve(problem.params, problem.order, problem.forcing, grid) for solve in (efds_solve, abm_solve)]

# %% amplitude over the last few forcing periods
period = 2 * np.pi
for tr in runs:
    amps = []
    for k in range(4, 0, -1):
        mask = (tr.t >= 100 - k * period) & (tr.t < 100 - (k - 1) * period)
        amps.append(np.ptp(tr.x[mask]) / 2)
    print(tr.scheme, "amplitudes of the last 4 periods:", ", ".join(f"{a:.4f}" for a in amps))

# %% phase portrait and oscillogram
for tr in runs:
    write_trajectory(out / f"trajectory_{tr.scheme}.csv", tr)
atomic_write_text(out / "phase.svg", plot_svg(runs, "phase"))
atomic_write_text(out / "oscillogram.svg", plot_svg(runs, "oscillogram"))
print("wrote", out / "phase.svg", "and", out / "oscillogram.svg")
