"""Adams-Bashforth-Moulton predictor-corrector for variable-order systems.

Each unknown ``u`` of the three-equation system is advanced in the integral
form ``u = u_0 + I^alpha[s]`` where ``s`` is that equation's right-hand side.
One step from ``n`` to ``n+1`` uses a product-rectangle predictor

    u^p = u_0 + h^a / Gamma(a+1) * sum_{j=0}^{n} theta_j s_j

followed by a single product-trapezoid corrector

    u_{n+1} = u_0 + h^a / Gamma(a+2) * (s^p + sum_{j=0}^{n} rho_j s_j),

with the orders ``a`` evaluated at ``t_{n+1}``.

Two layouts are provided. ``"staggered"`` (the default) is the system

    D^1 x = y,   D^{1-q} y = z,   D^q z = f - lam*z - omega0_sq*x - b*x**3,

``"duffing"`` is a rearrangement whose solution satisfies the oscillator
equation exactly when ``x0 = z0 = 0`` (``z`` is then the Caputo derivative of
order ``q`` of ``x``):

    D^1 x = y,   D^1 y = f - lam*z - omega0_sq*x - b*x**3,   D^{1-q} z = y.

The composition ``D^q D^{1-q}`` in the first layout does not reduce to the
fractional damping term of the oscillator, so ``"staggered"`` solves a
different model. Both layouts share the weights and the step machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from fracduffing.errors import SolverDivergence
from fracduffing.model import (
    ForcingSpec,
    GridSpec,
    OrderFunction,
    OscillatorParams,
    Trajectory,
    forcing_on_grid,
    gamma,
    validate_order,
)

__all__ = [
    "ABMWeights",
    "ABMState",
    "abm_weights",
    "abm_orders",
    "abm_predictor",
    "abm_corrector",
    "abm_solve",
]

Formulation = Literal["staggered", "duffing"]

# variable -> name of the history array it integrates, per layout
_SOURCES: dict[str, tuple[str, str, str]] = {
    "staggered": ("y", "z", "rhs"),
    "duffing": ("y", "rhs", "y"),
}


@dataclass(frozen=True, eq=False)
class ABMWeights:
    """Predictor (``theta``, length n+1) and corrector (``rho``, length n+2)
    weights for one step and one order."""

    n: int
    q: float
    rho: np.ndarray
    theta: np.ndarray


def abm_weights(n: int, q: float) -> ABMWeights:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if not 0.0 < q <= 1.0:
        raise ValueError(f"order must lie in (0, 1], got {q!r}")
    # m = n - j for j = 0..n
    m = np.arange(n, -1, -1, dtype=float)
    theta = (m + 1.0) ** q - m**q

    rho = np.empty(n + 2)
    p = q + 1.0
    rho[: n + 1] = (m + 2.0) ** p + m**p - 2.0 * (m + 1.0) ** p
    rho[0] = float(n) ** p - (n - q) * (n + 1.0) ** q
    rho[n + 1] = 1.0
    return ABMWeights(n=n, q=float(q), rho=rho, theta=theta)


def abm_orders(q_next: float, formulation: Formulation = "staggered") -> tuple[float, float, float]:
    """Orders of the (x, y, z) equations given ``q(t_{n+1})``."""
    if formulation == "staggered":
        return 1.0, 1.0 - q_next, q_next
    if formulation == "duffing":
        return 1.0, 1.0, 1.0 - q_next
    raise ValueError(f"unknown formulation {formulation!r}")


@dataclass(eq=False)
class ABMState:
    """Corrector values at nodes ``0..n`` plus the cached right-hand side
    ``rhs_j = f_j - lam*z_j - omega0_sq*x_j - b*x_j**3``."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    rhs: np.ndarray
    f: np.ndarray
    params: OscillatorParams
    formulation: Formulation = "staggered"

    @classmethod
    def initial(cls, params: OscillatorParams, f: np.ndarray, formulation: Formulation = "staggered"):
        size = len(f)
        state = cls(
            x=np.zeros(size),
            y=np.zeros(size),
            z=np.zeros(size),
            rhs=np.zeros(size),
            f=np.asarray(f, dtype=float),
            params=params,
            formulation=formulation,
        )
        state.x[0], state.y[0], state.z[0] = params.x0, params.y0, params.z0
        state.rhs[0] = state.rhs_at(0)
        return state

    def rhs_value(self, k: int, x: float, z: float) -> float:
        p = self.params
        return self.f[k] - p.lam * z - p.omega0_sq * x - p.b * x**3

    def rhs_at(self, k: int) -> float:
        return self.rhs_value(k, self.x[k], self.z[k])

    def history(self, name: str, n: int) -> np.ndarray:
        return getattr(self, name)[: n + 1]


def _initial_values(params: OscillatorParams) -> tuple[float, float, float]:
    return params.x0, params.y0, params.z0


def abm_predictor(
    state: ABMState,
    weights: tuple[ABMWeights, ABMWeights, ABMWeights],
    grid: GridSpec,
    n: int,
) -> tuple[float, float, float]:
    """Predicted ``(x, y, z)`` at node ``n+1`` from corrector history ``0..n``."""
    h = grid.h
    sources = _SOURCES[state.formulation]
    out = []
    for u0, w, src in zip(_initial_values(state.params), weights, sources):
        s = np.dot(w.theta, state.history(src, n))
        out.append(u0 + h**w.q / gamma(w.q + 1.0) * s)
    return tuple(out)


def abm_corrector(
    state: ABMState,
    predicted: tuple[float, float, float],
    weights: tuple[ABMWeights, ABMWeights, ABMWeights],
    grid: GridSpec,
    n: int,
) -> tuple[float, float, float]:
    """Single corrector application at node ``n+1``; no iteration.

    Raises :class:`SolverDivergence` if the result is not finite.
    """
    h = grid.h
    xp, yp, zp = predicted
    at_next = {"y": yp, "z": zp, "rhs": state.rhs_value(n + 1, xp, zp)}
    sources = _SOURCES[state.formulation]
    out = []
    for u0, w, src in zip(_initial_values(state.params), weights, sources):
        s = w.rho[n + 1] * at_next[src] + np.dot(w.rho[: n + 1], state.history(src, n))
        out.append(u0 + h**w.q / gamma(w.q + 2.0) * s)
    if not np.all(np.isfinite(out)):
        raise SolverDivergence("abm", n + 1, f"h={h!r}")
    return tuple(out)


def abm_solve(
    params: OscillatorParams,
    order: OrderFunction,
    forcing: ForcingSpec,
    grid: GridSpec,
    formulation: Formulation = "staggered",
) -> Trajectory:
    """Integrate with the predictor-corrector; ``aux`` is ``z``.

    O(N**2) time, O(N) memory.
    """
    q_nodes = validate_order(order, grid)
    t = grid.nodes
    state = ABMState.initial(params, forcing_on_grid(forcing, t), formulation)

    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(grid.N):
            orders = abm_orders(q_nodes[n + 1], formulation)
            weights = tuple(abm_weights(n, a) for a in orders)
            predicted = abm_predictor(state, weights, grid, n)
            x1, y1, z1 = abm_corrector(state, predicted, weights, grid, n)
            state.x[n + 1], state.y[n + 1], state.z[n + 1] = x1, y1, z1
            state.rhs[n + 1] = state.rhs_at(n + 1)
            if not np.isfinite(state.rhs[n + 1]):
                raise SolverDivergence("abm", n + 1, f"h={grid.h!r}")

    scheme = "abm" if formulation == "staggered" else f"abm-{formulation}"
    return Trajectory(t=t, x=state.x, y=state.y, aux=state.z, scheme=scheme)
