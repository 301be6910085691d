"""
Two ways to split the oscillator for the predictor-corrector
============================================================

``formulation="staggered"`` advances (x, y, z) with orders (1, 1-q, q).
Composing the last two equations gives x'' = rhs with z = I^q x'', a damping
term of order 2-q, so against the manufactured solution the error stalls.

``formulation="duffing"`` advances x' = y, y' = rhs and z = I^(1-q) y (the
Caputo derivative of x), which is the oscillator itself; with constant order
the error then falls at close to second order.
"""

from fracduffing import Constant, abm_solve, convergence_study, manufactured_problem

problem = manufactured_problem("consistent", order=Constant(0.5))
for formulation in ("staggered", "duffing"):
    solve = lambda *a, f=formulation: abm_solve(*a, formulation=f)
    report = convergence_study(problem, 10, 7, schemes=["abm"], solvers={"abm": solve})
    xi = report.column("xi", "abm")
    p2 = report.column("p2", "abm")[1:]
    print(formulation)
    print("  errors:", ", ".join(f"{v:.2e}" for v in xi))
    print("  order: ", ", ".join(f"{v:.2f}" for v in p2))
