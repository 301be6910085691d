"""
Error estimates without an exact solution
=========================================

Runge's double recalculation compares the run at step h with the run at h/2
on the shared nodes. Applied to the forced example on the unit horizon
(h = 1/N), the log-ratio accuracy p climbs toward 1 as the grid is refined.
"""

from fracduffing import runge_table_problem, convergence_study

report = convergence_study(runge_table_problem(), 10, 6, mode="runge")
print(f"{'N':>5} {'xi_abm':>11} {'p_abm':>7} {'xi_efds':>11} {'p_efds':>7}")
for r in report.rows:
    p = lambda v: "-" if v is None else f"{v:.4f}"
    print(f"{r.N:>5} {r.xi['abm']:>11.4e} {p(r.p['abm']):>7} {r.xi['efds']:>11.4e} {p(r.p['efds']):>7}")

# %% the same study through the CLI:
#   fracduffing converge --T 1 --mode runge --levels 6 --out runge_table
