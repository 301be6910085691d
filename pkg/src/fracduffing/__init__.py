"""Solvers for the Duffing oscillator with a variable-order fractional
derivative of Riemann-Liouville type.

Two schemes are provided: an explicit Grunwald-Letnikov finite-difference
scheme (:func:`efds_solve`) and an Adams-Bashforth-Moulton
predictor-corrector (:func:`abm_solve`), plus tools to verify them against a
manufactured solution and by Runge's double recalculation.
"""

from fracduffing.abm import ABMState, ABMWeights, abm_corrector, abm_predictor, abm_solve, abm_weights
from fracduffing.efds import GLCoefficients, efds_solve, gl_coefficients, gl_derivative_value
from fracduffing.errors import ConfigurationError, MetricDomainError, PoleError, SolverDivergence
from fracduffing.model import (
    Constant,
    GridSpec,
    Harmonic,
    Linear,
    Manufactured,
    NoForcing,
    OscillatorParams,
    Tabulated,
    Trajectory,
    eval_forcing,
    eval_order,
    gamma,
    validate_order,
)
from fracduffing.verification import (
    EXAMPLE_ORDER,
    ConvergenceReport,
    accuracy_sequence,
    classical_order,
    convergence_study,
    example_problem,
    exact_cubic,
    manufactured_forcing,
    manufactured_problem,
    max_error,
    runge_errors,
    runge_table_problem,
)

__version__ = "0.1.0"
