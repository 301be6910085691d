"""Manufactured-solution test problem, error metrics and convergence studies."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Literal, Sequence

import numpy as np

from fracduffing.abm import abm_solve
from fracduffing.efds import efds_solve
from fracduffing.errors import MetricDomainError
from fracduffing.model import (
    Constant,
    ForcingSpec,
    GridSpec,
    Harmonic,
    Linear,
    Manufactured,
    OrderFunction,
    OscillatorParams,
    Trajectory,
    gamma,
)

logger = logging.getLogger(__name__)

__all__ = [
    "manufactured_forcing",
    "exact_cubic",
    "max_error",
    "accuracy_sequence",
    "classical_order",
    "runge_errors",
    "Problem",
    "manufactured_problem",
    "example_problem",
    "runge_table_problem",
    "EXAMPLE_ORDER",
    "IC_MODES",
    "ConvergenceRow",
    "ConvergenceReport",
    "convergence_study",
    "SOLVERS",
]

#: q(t) = 0.8 - t/200, the order used for the forced limit-cycle run (T = 100)
EXAMPLE_ORDER = Linear(0.8, -0.005)

#: initial data for the manufactured problem; "offset" is what the reference
#: tables used, "consistent" matches x(t) = t**3
IC_MODES = {"offset": (0.01, 0.03), "consistent": (0.0, 0.0)}

_FACTORIAL_3 = 6.0  # Gamma(4)


def _memory_integral(t: float, order: OrderFunction) -> float:
    # int_0^t tau**3 (t - tau)**(-q) dtau, with q frozen at q(t)
    q = order(t)
    return gamma(1.0 - q) * _FACTORIAL_3 * t ** (4.0 - q) / gamma(5.0 - q)


def manufactured_forcing(
    t: float,
    lam: float,
    order: OrderFunction,
    method: Literal["auto", "fd", "closed"] = "auto",
) -> float:
    """Forcing that makes ``x(t) = t**3`` an exact solution (``omega0_sq = b = 1``).

    The fractional term is ``lam / Gamma(1 - q(t)) * d/dt g(t)`` with
    ``g(t) = Gamma(1-q(t)) Gamma(4) t**(4-q(t)) / Gamma(5-q(t))``. The
    derivative is a central difference with step ``max(1e-6, 1e-6*t)``
    (forward near ``t = 0``) so that the time dependence of ``q`` is
    differentiated too. For constant order the closed form
    ``lam * Gamma(4) * t**(3-q) / Gamma(4-q)`` is used unless ``method="fd"``.
    """
    if t < 0:
        raise ValueError(f"manufactured forcing is only defined for t >= 0, got {t!r}")
    base = t**9 + t**3 + 6.0 * t
    if lam == 0.0 or t == 0.0:
        return base

    if method == "closed" or (method == "auto" and isinstance(order, Constant)):
        if not isinstance(order, Constant):
            raise ValueError("closed form is only available for constant order")
        q = order.a
        return base + lam * _FACTORIAL_3 * t ** (3.0 - q) / gamma(4.0 - q)

    dt = max(1e-6, 1e-6 * t)
    if t < dt:
        dg = (_memory_integral(t + dt, order) - _memory_integral(t, order)) / dt
    else:
        dg = (_memory_integral(t + dt, order) - _memory_integral(t - dt, order)) / (2.0 * dt)
    return base + lam / gamma(1.0 - order(t)) * dg


def exact_cubic(t):
    return t**3


def max_error(numeric: Trajectory, reference: Callable) -> float:
    """``max_k |x_k - reference(t_k)|`` over the trajectory's nodes."""
    if len(numeric) == 0:
        raise ValueError("empty trajectory")
    ref = np.asarray(reference(numeric.t), dtype=float)
    return float(np.max(np.abs(numeric.x - ref)))


def accuracy_sequence(errors: Sequence[float]) -> list[float]:
    """``p_i = ln(e_i) / ln(e_{i+1})`` for consecutive refinement levels.

    This is a ratio of logarithms, not the usual ``log2(e_i/e_{i+1})``; see
    :func:`classical_order` for the latter. Every error must lie in (0, 1).
    """
    errors = [float(e) for e in errors]
    for i, e in enumerate(errors):
        if not (0.0 < e < 1.0) or math.isnan(e):
            raise MetricDomainError(f"error #{i} = {e!r} is outside (0, 1)")
    return [math.log(a) / math.log(b) for a, b in zip(errors, errors[1:])]


def classical_order(errors: Sequence[float], ratio: float = 2.0) -> list[float]:
    """Observed order ``log(e_i/e_{i+1}) / log(ratio)``."""
    errors = [float(e) for e in errors]
    for i, e in enumerate(errors):
        if not e > 0.0:
            raise MetricDomainError(f"error #{i} = {e!r} is not positive")
    return [math.log(a / b) / math.log(ratio) for a, b in zip(errors, errors[1:])]


def runge_errors(solve: Callable[[int], Trajectory], levels: Sequence[int]) -> list[float]:
    """Double-recalculation estimates ``max_k |x_h(t_k) - x_{h/2}(t_k)|``.

    ``solve(N)`` must return a trajectory on an ``N``-step grid. The fine
    solution is sampled at its even nodes. Each level needs the run at twice
    its ``N``; runs are reused along a doubling ladder.
    """
    levels = list(levels)
    for a, b in zip(levels, levels[1:]):
        if b != 2 * a:
            raise ValueError(f"levels must double: {a} -> {b}")
    cache: dict[int, Trajectory] = {}

    def run(N: int) -> Trajectory:
        if N not in cache:
            try:
                cache[N] = solve(N)
            except Exception as exc:
                raise RuntimeError(f"Runge level N={N}: {exc}") from exc
        return cache[N]

    out = []
    for N in levels:
        coarse, fine = run(N), run(2 * N)
        out.append(float(np.max(np.abs(coarse.x - fine.x[::2]))))
    return out


# {{{ problems


@dataclass(frozen=True)
class Problem:
    """Everything except the step count needed to run a scheme."""

    name: str
    params: OscillatorParams
    order: OrderFunction
    forcing: ForcingSpec
    T: float
    exact: Callable | None = None
    notes: tuple[str, ...] = ()

    def grid(self, N: int) -> GridSpec:
        return GridSpec(self.T, N)


def manufactured_problem(
    ic_mode: str = "offset",
    order: OrderFunction = EXAMPLE_ORDER,
    lam: float = 0.1,
    T: float = 1.0,
) -> Problem:
    """Test problem with exact solution ``t**3`` (``omega0_sq = b = 1``, ``delta = 0``)."""
    if ic_mode not in IC_MODES:
        raise ValueError(f"ic_mode must be one of {sorted(IC_MODES)}, got {ic_mode!r}")
    x0, y0 = IC_MODES[ic_mode]
    params = OscillatorParams(lam=lam, omega0_sq=1.0, b=1.0, delta=0.0, omega=0.0, x0=x0, y0=y0)
    notes = [f"ic_mode={ic_mode} (x0={x0!r}, y0={y0!r})", f"order={order!r}"]
    if ic_mode == "offset":
        notes.append("x0, y0 do not match the exact solution t**3 (which needs 0, 0)")
    return Problem(
        name="manufactured",
        params=params,
        order=order,
        forcing=Manufactured(lam, order),
        T=T,
        exact=exact_cubic,
        notes=tuple(notes),
    )


def example_problem(T: float = 100.0, order: OrderFunction = EXAMPLE_ORDER) -> Problem:
    """Harmonically forced oscillator with unit coefficients and zero initial data."""
    params = OscillatorParams(lam=1.0, omega0_sq=1.0, b=1.0, delta=1.0, omega=1.0)
    return Problem(
        name="example",
        params=params,
        order=order,
        forcing=Harmonic(params.delta, params.omega),
        T=T,
        notes=(f"order={order!r}", f"T={T!r}"),
    )


def runge_table_problem() -> Problem:
    """The forced example on the unit horizon used for the Runge-rule table
    (step ``h = 1/N``)."""
    return example_problem(T=1.0)


# }}}

# {{{ convergence study

SOLVERS: dict[str, Callable[..., Trajectory]] = {"efds": efds_solve, "abm": abm_solve}


@dataclass
class ConvergenceRow:
    N: int
    h: float
    xi: dict[str, float | None] = field(default_factory=dict)
    p: dict[str, float | None] = field(default_factory=dict)
    p2: dict[str, float | None] = field(default_factory=dict)


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow]
    mode: Literal["exact", "runge"]
    schemes: tuple[str, ...]
    problem: str = ""
    notes: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def column(self, kind: str, scheme: str) -> list[float | None]:
        return [getattr(row, kind).get(scheme) for row in self.rows]


def _pairwise(metric, xi: list[float | None], label: str, warnings: list[str]) -> list[float | None]:
    out: list[float | None] = [None]
    for i in range(1, len(xi)):
        a, b = xi[i - 1], xi[i]
        if a is None or b is None:
            out.append(None)
            continue
        try:
            out.append(metric([a, b])[0])
        except MetricDomainError as exc:
            warnings.append(f"{label} row {i}: {exc}")
            out.append(None)
    return out


def convergence_study(
    problem: Problem,
    N_start: int = 10,
    levels: int = 8,
    mode: Literal["exact", "runge"] = "exact",
    schemes: Iterable[str] = ("efds", "abm"),
    solvers: dict[str, Callable[..., Trajectory]] | None = None,
) -> ConvergenceReport:
    """Run each scheme over ``N_start * 2**i`` for ``i < levels``.

    ``mode="exact"`` measures against ``problem.exact``; ``mode="runge"``
    uses :func:`runge_errors`. Failed cells are left as ``None`` and
    described in ``report.warnings``.
    """
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    if mode == "exact" and problem.exact is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution; use mode='runge'")
    if mode not in ("exact", "runge"):
        raise ValueError(f"unknown mode {mode!r}")

    solvers = {**SOLVERS, **(solvers or {})}
    schemes = tuple(schemes)
    Ns = [N_start * 2**i for i in range(levels)]
    rows = [ConvergenceRow(N=N, h=problem.T / N) for N in Ns]
    report = ConvergenceReport(
        rows=rows, mode=mode, schemes=schemes, problem=problem.name, notes=list(problem.notes)
    )

    for scheme in schemes:
        solver = solvers[scheme]

        memo: dict[int, Trajectory] = {}

        def solve(N: int, solver=solver, memo=memo) -> Trajectory:
            if N not in memo:
                memo[N] = solver(problem.params, problem.order, problem.forcing, problem.grid(N))
            return memo[N]

        xi: list[float | None] = []
        if mode == "exact":
            for N in Ns:
                try:
                    xi.append(max_error(solve(N), problem.exact))
                except Exception as exc:
                    report.warnings.append(f"{scheme} N={N}: {exc}")
                    xi.append(None)
        else:
            for N in Ns:
                try:
                    xi.append(runge_errors(solve, [N])[0])
                except Exception as exc:
                    report.warnings.append(f"{scheme} N={N}: {exc}")
                    xi.append(None)

        p = _pairwise(accuracy_sequence, xi, f"p_{scheme}", report.warnings)
        p2 = _pairwise(classical_order, xi, f"p2_{scheme}", report.warnings)
        for row, a, b, c in zip(rows, xi, p, p2):
            row.xi[scheme], row.p[scheme], row.p2[scheme] = a, b, c

    for w in report.warnings:
        logger.warning(w)
    return report


# }}}
