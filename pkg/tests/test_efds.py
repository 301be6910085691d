import numpy as np
import pytest
from scipy.special import binom

from fracduffing.efds import efds_solve, gl_coefficients, gl_derivative_value
from fracduffing.errors import SolverDivergence
from fracduffing.model import (
    Constant,
    GridSpec,
    Harmonic,
    Linear,
    NoForcing,
    OscillatorParams,
    Tabulated,
)
from fracduffing.verification import (
    EXAMPLE_ORDER,
    convergence_study,
    manufactured_problem,
    max_error,
    exact_cubic,
)


def euler_duffing(params, forcing, grid):
    """Forward Euler for x'' + omega0_sq x + b x^3 = f, written from scratch."""
    h = grid.h
    x, y = [params.x0], [params.y0]
    for k in range(1, grid.N + 1):
        t_prev = (k - 1) * h
        x_prev, y_prev = x[-1], y[-1]
        accel = forcing(t_prev) - params.omega0_sq * x_prev - params.b * x_prev**3
        x.append(x_prev + h * y_prev)
        y.append(y_prev + h * accel)
    return np.array(x), np.array(y)


def test_coefficients_hand_recurrence():
    c = gl_coefficients(0.5, 3).c
    assert c.tolist() == [1.0, -0.5, -0.125]


@pytest.mark.parametrize("q", [0.01, 0.4, 0.99])
def test_single_coefficient(q):
    assert gl_coefficients(q, 1).c.tolist() == [1.0]


def test_coefficients_quarter_order_binomial():
    c = gl_coefficients(0.25, 4).c
    expected = [(-1) ** j * binom(0.25, j) for j in range(4)]
    np.testing.assert_allclose(c, expected, rtol=1e-14)


@pytest.mark.parametrize("q", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_coefficients_match_binomial(q):
    c = gl_coefficients(q, 65).c
    expected = np.array([(-1) ** j * binom(q, j) for j in range(65)])
    np.testing.assert_allclose(c, expected, rtol=1e-10)
    assert np.all(c[1:] < 0)


def test_coefficients_reproduce_recurrence_exactly():
    q = 0.37
    c = gl_coefficients(q, 200).c
    assert c[0] == 1.0
    for j in range(1, 200):
        assert c[j] == (1 - (1 + q) / j) * c[j - 1]


@pytest.mark.parametrize("q", [0.05, 0.5, 0.95])
def test_partial_sums_positive_and_decreasing(q):
    s = np.cumsum(gl_coefficients(q, 10_001).c)
    assert np.all(s > 0)
    assert np.all(np.diff(s) < 0)


def test_derivative_value_examples():
    assert gl_derivative_value([5.0], gl_coefficients(0.5, 1), 0.25) == pytest.approx(10.0)
    assert gl_derivative_value(np.zeros(7), gl_coefficients(0.3, 7), 0.1) == 0.0
    assert gl_derivative_value([1.0, 1.0], gl_coefficients(0.5, 2), 1.0) == 0.5


def test_derivative_value_length_mismatch():
    with pytest.raises(ValueError):
        gl_derivative_value([1.0, 2.0, 3.0], gl_coefficients(0.5, 2), 1.0)


def test_equilibrium_is_fixed_point():
    params = OscillatorParams(lam=0.0, x0=0.0, y0=0.0)
    tr = efds_solve(params, Constant(0.5), NoForcing(), GridSpec(10.0, 200))
    assert not tr.x.any() and not tr.y.any()


def test_zero_input_with_damping():
    params = OscillatorParams(lam=1.3, x0=0.0, y0=0.0)
    tr = efds_solve(params, EXAMPLE_ORDER, NoForcing(), GridSpec(100.0, 500))
    assert not tr.x.any() and not tr.y.any() and not tr.aux.any()


@pytest.mark.parametrize(
    "params, forcing",
    [
        (OscillatorParams(lam=0.0, x0=0.3, y0=-0.2), Harmonic(1.0, 1.0)),
        (OscillatorParams(lam=0.0, omega0_sq=2.5, b=0.4, x0=1.0, y0=0.0), Harmonic(0.3, 2.0)),
        (OscillatorParams(lam=0.0, omega0_sq=0.0, b=1.0, x0=0.1, y0=0.5), NoForcing()),
    ],
)
def test_zero_damping_is_forward_euler(params, forcing):
    grid = GridSpec(10.0, 1000)
    tr = efds_solve(params, EXAMPLE_ORDER, forcing, grid)
    x, y = euler_duffing(params, forcing, grid)
    assert np.max(np.abs(tr.x - x)) <= 1e-14
    assert np.max(np.abs(tr.y - y)) <= 1e-14


def test_step_update_by_hand():
    # two steps of the scheme written out explicitly
    p = OscillatorParams(lam=0.7, omega0_sq=1.2, b=0.5, x0=0.3, y0=-0.4)
    q = Linear(0.6, -0.1)
    f = Harmonic(0.9, 2.0)
    h = 0.05
    tr = efds_solve(p, q, f, GridSpec(0.1, 2))

    x1 = p.x0 + h * p.y0
    w1 = h ** -q(h) * x1
    y1 = p.y0 + h * (-1.2 * p.x0 - 0.5 * p.x0**3 + f(0.0) - 0.7 * w1)
    x2 = x1 + h * y1
    q2 = q(2 * h)
    w2 = h**-q2 * (x2 + (1 - (1 + q2)) * x1)
    y2 = y1 + h * (-1.2 * x1 - 0.5 * x1**3 + f(h) - 0.7 * w2)
    np.testing.assert_allclose(tr.x, [p.x0, x1, x2], rtol=1e-15)
    np.testing.assert_allclose(tr.y, [p.y0, y1, y2], rtol=1e-14)
    np.testing.assert_allclose(tr.aux, [0.0, w1, w2], rtol=1e-14)


def test_constant_order_shortcut_matches_general_path():
    p = OscillatorParams(lam=0.8, x0=0.2, y0=0.1)
    grid = GridSpec(5.0, 300)
    a = efds_solve(p, Constant(0.45), Harmonic(1.0, 1.0), grid)
    table = Tabulated((0.0, 5.0), (0.45, 0.45))
    b = efds_solve(p, table, Harmonic(1.0, 1.0), grid)
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)


def test_deterministic():
    p = OscillatorParams()
    grid = GridSpec(100.0, 900)
    a = efds_solve(p, EXAMPLE_ORDER, Harmonic(1.0, 1.0), grid)
    b = efds_solve(p, EXAMPLE_ORDER, Harmonic(1.0, 1.0), grid)
    assert a.x.tobytes() == b.x.tobytes()
    assert a.y.tobytes() == b.y.tobytes()


def test_blow_up_reports_step():
    with pytest.raises(SolverDivergence) as info:
        efds_solve(OscillatorParams(), EXAMPLE_ORDER, Harmonic(1.0, 1.0), GridSpec(100.0, 10))
    assert info.value.step == 10


def test_first_order_convergence_at_constant_order():
    # consistent initial data and constant order: the forcing is exact for the
    # frozen-order operator, so the scheme's own first-order error shows
    problem = manufactured_problem("consistent", order=Constant(0.5))
    report = convergence_study(problem, 10, 7, schemes=["efds"])
    p2 = report.column("p2", "efds")[2:]
    assert all(0.9 < v < 1.1 for v in p2)


@pytest.mark.xfail(
    strict=True,
    reason="offset initial data (0.01, 0.03) leave an O(1e-2) offset from t**3; "
    "the reference 1.9e-4 is not reachable by this scheme",
)
def test_manufactured_error_at_1280_near_reference():
    problem = manufactured_problem("offset")
    tr = efds_solve(problem.params, problem.order, problem.forcing, problem.grid(1280))
    assert 1.9e-5 <= max_error(tr, exact_cubic) <= 1.9e-3
