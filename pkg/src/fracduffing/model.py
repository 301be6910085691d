r"""Problem definition for the variable-order fractional Duffing oscillator.

The model is

.. math::

    \ddot x + \lambda D_{0t}^{q(t)} x + \omega_0^2 x + b x^3 = f(t),
    \qquad x(0) = x_0,\ \dot x(0) = y_0,

where :math:`D_{0t}^{q(t)}` is a Riemann-Liouville type derivative whose order
:math:`0 < q(t) < 1` may vary in time. Everything in this module is immutable
and safe to share between concurrent solver runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from fracduffing.errors import ConfigurationError, PoleError

__all__ = [
    "gamma",
    "OscillatorParams",
    "Constant",
    "Linear",
    "Tabulated",
    "OrderFunction",
    "NoForcing",
    "Harmonic",
    "Manufactured",
    "ForcingSpec",
    "GridSpec",
    "Trajectory",
    "eval_order",
    "eval_forcing",
    "validate_order",
    "forcing_on_grid",
]


def gamma(x: float) -> float:
    """Euler's gamma function.

    Delegates to the C library (``math.gamma``), which is accurate to a few
    ulp on the positive axis and uses reflection for negative arguments.
    Raises :class:`PoleError` at ``0, -1, -2, ...``.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"gamma: argument must be finite, got {x!r}")
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"gamma has a pole at {x!r}")
    return math.gamma(x)


@dataclass(frozen=True)
class OscillatorParams:
    """Physical coefficients and initial data.

    ``z0`` is the initial value of the auxiliary variable used by the
    predictor-corrector system; it defaults to 0.
    """

    lam: float = 1.0
    omega0_sq: float = 1.0
    b: float = 1.0
    delta: float = 1.0
    omega: float = 1.0
    x0: float = 0.0
    y0: float = 0.0
    z0: float = 0.0

    def __post_init__(self):
        for name in ("lam", "omega0_sq", "b", "delta", "omega", "x0", "y0", "z0"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigurationError(f"{name} must be finite, got {value!r}")
        if self.omega0_sq < 0:
            raise ConfigurationError(f"omega0_sq must be >= 0, got {self.omega0_sq!r}")


# {{{ order functions


@dataclass(frozen=True)
class Constant:
    """Constant order ``q(t) = a``."""

    a: float

    def __call__(self, t):
        if np.ndim(t):
            return np.full(np.shape(t), self.a, dtype=float)
        return float(self.a)

    def to_flag(self) -> str:
        return f"const:{self.a!r}"


@dataclass(frozen=True)
class Linear:
    """Linear order ``q(t) = a + slope * t``."""

    a: float
    slope: float

    def __call__(self, t):
        if np.ndim(t):
            return self.a + self.slope * np.asarray(t, dtype=float)
        return float(self.a + self.slope * t)

    def to_flag(self) -> str:
        return f"linear:{self.a!r}:{self.slope!r}"


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear interpolation through ``(nodes[i], values[i])``."""

    nodes: tuple[float, ...]
    values: tuple[float, ...]
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        nodes = tuple(float(v) for v in self.nodes)
        values = tuple(float(v) for v in self.values)
        if len(nodes) != len(values) or len(nodes) < 2:
            raise ConfigurationError("tabulated order needs >= 2 (t, q) pairs of equal length")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise ConfigurationError("tabulated order nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        out = np.interp(t, self.nodes, self.values)
        return out if np.ndim(t) else float(out)

    def covers(self, t0: float, t1: float) -> bool:
        return self.nodes[0] <= t0 and self.nodes[-1] >= t1

    def to_flag(self) -> str:
        if self.source is None:
            raise ConfigurationError("tabulated order without a source file has no flag form")
        return f"table:{self.source}"


OrderFunction = Union[Constant, Linear, Tabulated]


def eval_order(q: OrderFunction, t: float) -> float:
    """Evaluate ``q(t)`` and check that it lies strictly inside (0, 1)."""
    value = q(t)
    if not 0.0 < value < 1.0:
        raise ConfigurationError(f"order q(t) must lie in (0, 1); q({t!r}) = {value!r}")
    return value


# }}}

# {{{ forcing


@dataclass(frozen=True)
class NoForcing:
    def __call__(self, t: float) -> float:
        return 0.0


@dataclass(frozen=True)
class Harmonic:
    """``f(t) = delta * cos(omega * t)``."""

    delta: float
    omega: float

    def __call__(self, t: float) -> float:
        return self.delta * math.cos(self.omega * t)


@dataclass(frozen=True)
class Manufactured:
    """Forcing for which ``x(t) = t**3`` solves the model with ``omega0_sq = b = 1``.

    See :func:`fracduffing.verification.manufactured_forcing`.
    """

    lam: float
    order: OrderFunction

    def __call__(self, t: float) -> float:
        from fracduffing.verification import manufactured_forcing

        return manufactured_forcing(t, self.lam, self.order)


ForcingSpec = Union[NoForcing, Harmonic, Manufactured]


def eval_forcing(f: ForcingSpec | Callable[[float], float], t: float) -> float:
    if t < 0:
        raise ValueError(f"forcing is only defined for t >= 0, got {t!r}")
    return float(f(t))


def forcing_on_grid(f: ForcingSpec, t: np.ndarray) -> np.ndarray:
    return np.array([f(float(tk)) for tk in t], dtype=float)


# }}}


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid ``t_k = k * h`` on ``[0, T]`` with ``N`` steps."""

    T: float
    N: int

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise ConfigurationError(f"N must be a positive integer, got {self.N!r}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise ConfigurationError(f"T must be positive and finite, got {self.T!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "T", float(self.T))

    @property
    def h(self) -> float:
        return self.T / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.N + 1, dtype=float) * self.h

    def refine(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.T, self.N * factor)


def validate_order(q: OrderFunction, grid: GridSpec) -> np.ndarray:
    """Evaluate ``q`` on every grid node; fail with a full diagnostic if any
    value leaves (0, 1).

    Returns the array of node values.
    """
    if isinstance(q, Tabulated) and not q.covers(0.0, grid.T):
        raise ConfigurationError(
            f"tabulated order covers [{q.nodes[0]}, {q.nodes[-1]}], not [0, {grid.T}]"
        )
    t = grid.nodes
    values = np.asarray(q(t), dtype=float)
    bad = np.flatnonzero(~((values > 0.0) & (values < 1.0)))
    if bad.size:
        shown = ", ".join(f"q({float(t[k])!r})={float(values[k])!r}" for k in bad[:5])
        more = f" and {bad.size - 5} more" if bad.size > 5 else ""
        raise ConfigurationError(f"order leaves (0, 1) at {bad.size} node(s): {shown}{more}")
    return values


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Grid values produced by a solver.

    ``aux`` holds the Grunwald-Letnikov derivative value for the explicit
    scheme and the auxiliary variable ``z`` for the predictor-corrector.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    aux: np.ndarray
    scheme: str

    def __post_init__(self):
        n = len(self.t)
        if not (len(self.x) == len(self.y) == len(self.aux) == n):
            raise ValueError("trajectory vectors must have identical length")

    def __len__(self) -> int:
        return len(self.t)
