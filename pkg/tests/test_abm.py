import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracduffing.abm import (
    ABMState,
    abm_corrector,
    abm_orders,
    abm_predictor,
    abm_solve,
    abm_weights,
)
from fracduffing.efds import efds_solve
from fracduffing.errors import SolverDivergence
from fracduffing.model import Constant, GridSpec, Harmonic, NoForcing, OscillatorParams, gamma
from fracduffing.verification import (
    EXAMPLE_ORDER,
    convergence_study,
    exact_cubic,
    manufactured_problem,
    max_error,
)

orders = st.floats(min_value=1e-3, max_value=1.0, allow_nan=False)


@pytest.mark.parametrize("q", [0.2, 0.5, 1.0])
def test_weights_first_step(q):
    w = abm_weights(0, q)
    np.testing.assert_allclose(w.rho, [q, 1.0], rtol=1e-15)
    assert w.theta.tolist() == [1.0]


def test_weights_integer_order_trapezoid():
    w = abm_weights(1, 1.0)
    assert w.rho.tolist() == [1.0, 2.0, 1.0]


@given(n=st.integers(0, 256), q=orders)
def test_last_theta_and_rho(n, q):
    w = abm_weights(n, q)
    assert w.theta[n] == 1.0
    assert w.rho[n + 1] == 1.0
    assert len(w.theta) == n + 1 and len(w.rho) == n + 2


@given(n=st.integers(0, 256), q=orders)
def test_weights_match_definitions(n, q):
    w = abm_weights(n, q)
    # second differences of (n+2)**(q+1)-sized terms cancel; scale the tolerance
    tol = 64 * np.finfo(float).eps * (n + 2) ** (q + 1)
    assert w.rho[0] == pytest.approx(n ** (q + 1) - (n - q) * (n + 1) ** q, abs=tol)
    for j in range(1, n + 1):
        expected = (n - j + 2) ** (q + 1) + (n - j) ** (q + 1) - 2 * (n - j + 1) ** (q + 1)
        assert w.rho[j] == pytest.approx(expected, abs=tol)
    for j in range(n + 1):
        assert w.theta[j] == pytest.approx((n - j + 1) ** q - (n - j) ** q, rel=1e-12)


def test_weights_nonnegative_random_samples():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(0, 257))
        q = float(rng.uniform(1e-6, 1.0))
        w = abm_weights(n, q)
        assert np.all(w.rho >= 0) and np.all(w.theta >= 0)


@settings(max_examples=200)
@given(n=st.integers(0, 256), q=orders)
def test_theta_telescopes(n, q):
    w = abm_weights(n, q)
    assert abs(w.theta.sum() - (n + 1) ** q) <= 1e-12 * (n + 1) ** q


def test_weights_reject_nonpositive_order():
    with pytest.raises(ValueError):
        abm_weights(3, 0.0)
    with pytest.raises(ValueError):
        abm_weights(3, 1.5)


def test_orders():
    assert abm_orders(0.3) == (1.0, pytest.approx(0.7), 0.3)
    assert abm_orders(0.3, "duffing") == (1.0, 1.0, pytest.approx(0.7))


def _state(params, f, n_filled, rng=None, formulation="staggered"):
    state = ABMState.initial(params, f, formulation)
    if rng is not None:
        for k in range(1, n_filled + 1):
            state.x[k], state.y[k], state.z[k] = rng.normal(size=3)
            state.rhs[k] = state.rhs_at(k)
    return state


def _weights(n, q_next, formulation="staggered"):
    return tuple(abm_weights(n, a) for a in abm_orders(q_next, formulation))


def test_predictor_zero_history():
    params = OscillatorParams(x0=0.0, y0=0.0, z0=0.0)
    state = _state(params, np.zeros(6), 0)
    grid = GridSpec(1.0, 5)
    assert abm_predictor(state, _weights(0, 0.5), grid, 0) == (0.0, 0.0, 0.0)


def test_predictor_first_step_by_hand():
    params = OscillatorParams(lam=0.4, omega0_sq=1.1, b=0.6, x0=0.2, y0=-0.3, z0=0.15)
    f = np.array([0.9, 0.0, 0.0])
    grid = GridSpec(0.2, 2)
    h = grid.h
    state = _state(params, f, 0)
    xp, yp, zp = abm_predictor(state, _weights(0, 0.5), grid, 0)

    rhs0 = 0.9 - 0.4 * 0.15 - 1.1 * 0.2 - 0.6 * 0.2**3
    assert state.rhs[0] == pytest.approx(rhs0, rel=1e-15)
    assert gamma(1.5) == pytest.approx(0.8862269254527580, rel=1e-15)
    assert xp == pytest.approx(0.2 + h * -0.3, rel=1e-15)
    assert yp == pytest.approx(-0.3 + h**0.5 / 0.8862269254527580 * 0.15, rel=1e-14)
    assert zp == pytest.approx(0.15 + h**0.5 / 0.8862269254527580 * rhs0, rel=1e-14)


def test_corrector_zero_history():
    params = OscillatorParams(x0=0.0, y0=0.0, z0=0.0)
    state = _state(params, np.zeros(4), 0)
    out = abm_corrector(state, (0.0, 0.0, 0.0), _weights(0, 0.4), GridSpec(1.0, 3), 0)
    assert out == (0.0, 0.0, 0.0)


def test_corrector_first_step_trapezoid():
    params = OscillatorParams(x0=0.5, y0=2.0)
    state = _state(params, np.zeros(3), 0)
    grid = GridSpec(0.2, 2)
    yp = 1.7
    x1, _, _ = abm_corrector(state, (0.9, yp, 0.1), _weights(0, 0.5), grid, 0)
    assert x1 == pytest.approx(0.5 + grid.h / 2 * (yp + 2.0), rel=1e-15)


@pytest.mark.parametrize("n", range(9))
def test_corrector_integer_order_trapezoid_sums(n):
    rng = np.random.default_rng(n)
    params = OscillatorParams(x0=rng.normal(), y0=rng.normal())
    grid = GridSpec(1.0, 10)
    state = _state(params, rng.normal(size=11), n, rng)
    yp = float(rng.normal())
    x_next, _, _ = abm_corrector(state, (0.0, yp, 0.0), _weights(n, 0.5), grid, n)
    y = state.y
    hand = params.x0 + grid.h / 2 * (y[0] + 2 * sum(y[1 : n + 1]) + yp)
    assert x_next == pytest.approx(hand, rel=1e-13)


def test_corrector_third_equation_by_hand():
    rng = np.random.default_rng(3)
    params = OscillatorParams(lam=0.3, omega0_sq=1.4, b=0.8, x0=0.1, y0=0.2, z0=0.3)
    grid = GridSpec(1.0, 8)
    n = 3
    state = _state(params, rng.normal(size=9), n, rng)
    q = 0.35
    xp, yp, zp = 0.4, -0.2, 0.6
    _, y1, z1 = abm_corrector(state, (xp, yp, zp), _weights(n, q), grid, n)

    h = grid.h
    rhs_p = state.f[n + 1] - 0.3 * zp - 1.4 * xp - 0.8 * xp**3
    hist = 0.0
    for j in range(n + 1):
        if j == 0:
            r = n ** (q + 1) - (n - q) * (n + 1) ** q
        else:
            r = (n - j + 2) ** (q + 1) + (n - j) ** (q + 1) - 2 * (n - j + 1) ** (q + 1)
        rhs_j = state.f[j] - 0.3 * state.z[j] - 1.4 * state.x[j] - 0.8 * state.x[j] ** 3
        hist += r * rhs_j
    expected = 0.3 + h**q / math.gamma(q + 2) * (rhs_p + hist)
    assert z1 == pytest.approx(expected, rel=1e-13)


def test_state_rhs_cache():
    params = OscillatorParams(lam=0.7, omega0_sq=1.3, b=0.2, x0=0.1, y0=0.05)
    grid = GridSpec(10.0, 200)
    tr = abm_solve(params, EXAMPLE_ORDER, Harmonic(1.0, 1.0), grid)
    f = np.cos(grid.nodes)
    rhs = f - 0.7 * tr.aux - 1.3 * tr.x - 0.2 * tr.x**3
    state = ABMState.initial(params, f)
    state.x[:], state.z[:] = tr.x, tr.aux
    for k in range(len(f)):
        assert state.rhs_at(k) == pytest.approx(rhs[k], rel=1e-15, abs=1e-300)


def test_zero_trajectory():
    tr = abm_solve(OscillatorParams(), EXAMPLE_ORDER, NoForcing(), GridSpec(100.0, 300))
    assert not tr.x.any() and not tr.y.any() and not tr.aux.any()


def test_deterministic():
    grid = GridSpec(100.0, 600)
    a = abm_solve(OscillatorParams(), EXAMPLE_ORDER, Harmonic(1.0, 1.0), grid)
    b = abm_solve(OscillatorParams(), EXAMPLE_ORDER, Harmonic(1.0, 1.0), grid)
    assert a.x.tobytes() == b.x.tobytes() and a.aux.tobytes() == b.aux.tobytes()


def test_blow_up_reports_step():
    with pytest.raises(SolverDivergence) as info:
        abm_solve(OscillatorParams(), EXAMPLE_ORDER, Harmonic(1.0, 1.0), GridSpec(100.0, 10))
    assert info.value.step == 7


def test_zero_damping_is_classical_trapezoid_pece():
    # with lam = 0 the z equation decouples from x in the "duffing" layout, which
    # then reduces to the classical second-order PECE (Euler + trapezoid)
    params = OscillatorParams(lam=0.0, x0=0.4, y0=0.1)
    grid = GridSpec(2.0, 40)
    tr = abm_solve(params, Constant(0.5), Harmonic(1.0, 1.0), grid, formulation="duffing")
    h, x, y = grid.h, [0.4], [0.1]
    acc = lambda k, xv: math.cos(k * h) - xv - xv**3
    for n in range(grid.N):
        # history sums: trapezoid weights 1, 2, ..., 2 and Euler predictor
        xp = 0.4 + h * sum(y)
        yp = 0.1 + h * sum(acc(j, x[j]) for j in range(n + 1))
        sx = y[0] + 2 * sum(y[1:]) + yp
        sy = acc(0, x[0]) + 2 * sum(acc(j, x[j]) for j in range(1, n + 1)) + acc(n + 1, xp)
        x.append(0.4 + h / 2 * sx)
        y.append(0.1 + h / 2 * sy)
    np.testing.assert_allclose(tr.x, x, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(tr.y, y, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.7])
def test_duffing_layout_converges_to_manufactured_solution(q):
    problem = manufactured_problem("consistent", order=Constant(q))
    solve = lambda *a: abm_solve(*a, formulation="duffing")
    report = convergence_study(problem, 10, 6, schemes=["abm"], solvers={"abm": solve})
    xi = report.column("xi", "abm")
    assert all(a > b for a, b in zip(xi, xi[1:]))
    assert xi[-1] < 1e-4
    efds = efds_solve(problem.params, problem.order, problem.forcing, problem.grid(320))
    assert xi[-1] < max_error(efds, exact_cubic) / 100


_STAGGERED_ABM = "the reference three-equation system composes D^q D^(1-q) on y, which solves " \
    "x'' + lam*D^(2-q)x + ... rather than the oscillator; error plateaus near 2e-2"


@pytest.mark.xfail(strict=True, reason=_STAGGERED_ABM)
def test_manufactured_ladder_near_reference_values():
    problem = manufactured_problem("offset")
    reference = [6.415779e-3, 1.892361e-3, 5.71043e-4, 1.73628e-4]
    for N, ref in zip([10, 20, 40, 80], reference):
        tr = abm_solve(problem.params, problem.order, problem.forcing, problem.grid(N))
        assert ref / 10 <= max_error(tr, exact_cubic) <= ref * 10


@pytest.mark.xfail(strict=True, reason=_STAGGERED_ABM)
def test_abm_beats_efds_on_every_level():
    report = convergence_study(manufactured_problem("offset"), 10, 8)
    for row in report.rows:
        assert row.xi["abm"] < row.xi["efds"]
