"""Exception types raised across the package."""

from __future__ import annotations


class ConfigurationError(ValueError):
    """Invalid problem setup (order out of range, bad grid, bad flags)."""


class PoleError(ValueError):
    """Gamma function evaluated at a non-positive integer."""


class MetricDomainError(ValueError):
    """Error values outside the domain of the accuracy metric."""


class SolverDivergence(RuntimeError):
    """A scheme produced a non-finite state.

    ``step`` is the grid index at which the blow-up was detected.
    """

    def __init__(self, scheme: str, step: int, detail: str = ""):
        self.scheme = scheme
        self.step = step
        msg = f"{scheme}: non-finite state at step {step}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
