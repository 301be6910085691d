"""Grunwald-Letnikov coefficients and the explicit finite-difference scheme.

The fractional term is replaced by the difference analogue

    w_k = h**(-q_k) * sum_{j=0}^{k-1} c_j x_{k-j},
    c_0 = 1,  c_j = (1 - (1 + q_k) / j) c_{j-1},

and the first-order system ``x' = y``, ``y' = f - lam*w - omega0_sq*x - b*x**3``
is advanced with forward differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fracduffing.errors import SolverDivergence
from fracduffing.model import (
    Constant,
    ForcingSpec,
    GridSpec,
    OrderFunction,
    OscillatorParams,
    Trajectory,
    forcing_on_grid,
    validate_order,
)

__all__ = ["GLCoefficients", "gl_coefficients", "gl_derivative_value", "efds_solve"]


@dataclass(frozen=True, eq=False)
class GLCoefficients:
    q: float
    c: np.ndarray

    def __len__(self) -> int:
        return len(self.c)


def gl_coefficients(q: float, count: int) -> GLCoefficients:
    """Return ``c_0 .. c_{count-1}`` for order ``q``.

    The running product is the recurrence itself, so ``c[j]`` equals
    ``(1 - (1+q)/j) * c[j-1]`` bit for bit.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    factors = np.empty(count)
    factors[0] = 1.0
    j = np.arange(1, count, dtype=float)
    factors[1:] = 1.0 - (1.0 + q) / j
    return GLCoefficients(float(q), np.cumprod(factors))


def gl_derivative_value(x_history, coeffs: GLCoefficients, h: float) -> float:
    """``h**(-q) * sum_j c_j * x_history[j]`` with ``x_history`` newest first."""
    x_history = np.asarray(x_history, dtype=float)
    k = len(x_history)
    if k > len(coeffs.c):
        raise ValueError(f"need {k} coefficients, got {len(coeffs.c)}")
    return float(h ** (-coeffs.q) * np.dot(coeffs.c[:k], x_history))


def efds_solve(
    params: OscillatorParams,
    order: OrderFunction,
    forcing: ForcingSpec,
    grid: GridSpec,
) -> Trajectory:
    """Integrate the oscillator with the explicit finite-difference scheme.

    Each step first advances ``x_k = x_{k-1} + h*y_{k-1}``, then evaluates the
    memory sum at ``q_k = q(t_k)`` (which includes the new ``x_k`` as its
    ``j = 0`` term), then advances ``y``. The forcing is taken at ``t_{k-1}``.
    ``aux[k]`` holds the memory sum ``w``; ``aux[0]`` is 0.

    Cost is O(N**2) time and O(N) memory. Raises :class:`SolverDivergence`
    on the first non-finite state.
    """
    q_nodes = validate_order(order, grid)
    N, h = grid.N, grid.h
    t = grid.nodes
    f = forcing_on_grid(forcing, t)

    x = np.empty(N + 1)
    y = np.empty(N + 1)
    w = np.zeros(N + 1)
    x[0], y[0] = params.x0, params.y0

    # constant order: one coefficient vector, prefix-sliced per step
    shared = gl_coefficients(q_nodes[0], N) if isinstance(order, Constant) else None

    lam, w0, b = params.lam, params.omega0_sq, params.b
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, N + 1):
            x[k] = h * y[k - 1] + x[k - 1]
            coeffs = shared if shared is not None else gl_coefficients(q_nodes[k], k)
            # x_k, x_{k-1}, ..., x_1
            w[k] = h ** (-coeffs.q) * np.dot(coeffs.c[:k], x[k:0:-1])
            xp = x[k - 1]
            y[k] = y[k - 1] + h * (-w0 * xp - b * xp**3 + f[k - 1] - lam * w[k])
            if not (np.isfinite(x[k]) and np.isfinite(y[k]) and np.isfinite(w[k])):
                raise SolverDivergence("efds", k, f"h={h!r}")

    return Trajectory(t=t, x=x, y=y, aux=w, scheme="efds")
