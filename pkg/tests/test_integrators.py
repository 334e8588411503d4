import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from epibench import kernels
from epibench.accuracy import exact_trajectory
from epibench.errors import GridError, NonFiniteStateError
from epibench.integrators import (
    METHODS,
    Grid,
    Trajectory,
    euler_solve,
    euler_step,
    make_grid,
    pc_solve,
    pc_step,
    rk4_solve,
    rk4_stages,
    rk4_step,
    solve,
)
from epibench.metrics import r_squared
from epibench.models import (
    DEFAULT_ALPHA,
    DEFAULT_STEPS,
    SiParams,
    default_initial_state,
    default_params,
)

SI = default_params("si")
SIR = default_params("sir")
SOLVERS = {"euler": euler_solve, "rk4": rk4_solve, "pc": pc_solve}


# -------------------------------------------------------------- grid

@pytest.mark.parametrize("h, n", [(0.25, 56), (0.1, 140), (0.01, 1400), (0.025, 560)])
def test_make_grid_counts(h, n):
    g = make_grid(0, 14, h)
    assert g.n == n
    assert len(g.times) == n + 1
    assert g.times[-1] == 14.0
    assert g.h * g.n == pytest.approx(14, rel=1e-12)


@pytest.mark.parametrize("h", [0.3, 0.15, 5.0, 0.0, -0.25, 20.0])
def test_make_grid_rejects_non_divisors(h):
    with pytest.raises(GridError):
        make_grid(0, 14, h)


def test_grid_nodes_are_not_accumulated():
    g = make_grid(0, 14, 0.01)
    np.testing.assert_array_equal(g.times[:-1], np.arange(1400) * g.h)


def test_grid_rejects_bad_interval():
    with pytest.raises(GridError):
        Grid(1.0, 1.0, 4)
    with pytest.raises(GridError):
        Grid(0.0, 1.0, 0)


def test_trajectory_needs_n_plus_one_states():
    with pytest.raises(ValueError):
        Trajectory(make_grid(0, 1, 0.5), np.zeros((2, 2)), "euler")


# -------------------------------------------------------------- single steps

def test_euler_single_step_hand_value():
    tr = euler_solve(SI.rhs, [762, 1], make_grid(0, 0.25, 0.25))
    np.testing.assert_allclose(tr.states[1], [761.58471, 1.41529], rtol=0, atol=1e-9)


def _rk4_mpmath(alpha, s, i, h):
    """Stage-by-stage RK4 on SI at 50 digits, written per compartment."""
    with mpmath.workdps(50):
        a, s, i, h = (mpmath.mpf(v) for v in (alpha, s, i, h))
        k1s, k1i = -a * s * i, a * s * i
        k2s = -a * (s + h * k1s / 2) * (i + h * k1i / 2)
        k2i = a * (s + h * k1s / 2) * (i + h * k1i / 2)
        k3s = -a * (s + h * k2s / 2) * (i + h * k2i / 2)
        k3i = a * (s + h * k2s / 2) * (i + h * k2i / 2)
        k4s = -a * (s + h * k3s) * (i + h * k3i)
        k4i = a * (s + h * k3s) * (i + h * k3i)
        return (
            s + h / 6 * (k1s + 2 * k2s + 2 * k3s + k4s),
            i + h / 6 * (k1i + 2 * k2i + 2 * k3i + k4i),
        )


def test_rk4_single_step_matches_extended_precision(backend):
    grid = make_grid(0, 0.25, 0.25)
    got = kernels.simulate(SI, "rk4", [762, 1], grid, backend).final
    expected = _rk4_mpmath(DEFAULT_ALPHA, 762, 1, 0.25)
    for g, e in zip(got, expected):
        assert abs(mpmath.mpf(float(g)) - e) / abs(e) <= 1e-12


def test_rk4_zero_rhs_leaves_state_and_slopes_zero():
    zero = lambda t, y: np.zeros_like(y)
    stages = rk4_stages(zero, 0.0, np.array([3.0, 4.0]), 0.5)
    for k in (stages.k1, stages.k2, stages.k3, stages.k4):
        np.testing.assert_array_equal(k, 0.0)
    np.testing.assert_array_equal(rk4_step(zero, 0.0, np.array([3.0, 4.0]), 0.5), [3.0, 4.0])


@pytest.mark.parametrize("method", METHODS)
def test_fixed_point_gives_constant_trajectory(method):
    tr = SOLVERS[method](SI.rhs, [763.0, 0.0], make_grid(0, 14, 0.25))
    np.testing.assert_array_equal(tr.states, np.tile([763.0, 0.0], (57, 1)))


def test_pc_equals_euler_for_state_independent_rhs():
    rhs = lambda t, y: np.array([0.5, -2.0])
    grid = make_grid(0, 14, 0.1)
    np.testing.assert_array_equal(pc_solve(rhs, [1.0, 2.0], grid).states, euler_solve(rhs, [1.0, 2.0], grid).states)


def test_pc_applies_corrector_once():
    calls = []

    def rhs(t, y):
        calls.append(t)
        return -y

    pc_solve(rhs, [1.0], make_grid(0, 1, 0.25))
    assert len(calls) == 2 * 4
    assert calls[:2] == [0.0, 0.25]


def test_rk4_stage_times():
    calls = []

    def rhs(t, y):
        calls.append(t)
        return -y

    rk4_step(rhs, 1.0, np.array([1.0]), 0.5)
    assert calls == [1.0, 1.25, 1.25, 1.5]


# ------------------------------------------------ symbolic specialisation

a, b, h, S, I, R = sp.symbols("alpha beta h S I R")


def _sym_si(t, y):
    s, i = y
    return np.array([-a * s * i, a * s * i], dtype=object)


def _sym_sir(t, y):
    s, i, r = y
    return np.array([-a * s * i, a * s * i - b * i, b * i], dtype=object)


def _same(lhs, rhs):
    # the steppers use float literals (0.5, 2.0, h/6.0); recover the rationals
    return all(sp.expand(sp.nsimplify(x) - y) == 0 for x, y in zip(lhs, rhs))


def test_euler_expands_to_per_compartment_form():
    y = np.array([S, I], dtype=object)
    assert _same(euler_step(_sym_si, 0, y, h), [S + h * (-a * S * I), I + h * (a * S * I)])
    y = np.array([S, I, R], dtype=object)
    assert _same(
        euler_step(_sym_sir, 0, y, h),
        [S + h * (-a * S * I), I + h * (a * S * I - b * I), R + h * (b * I)],
    )


def test_rk4_expands_to_per_compartment_form():
    y = np.array([S, I, R], dtype=object)
    k1s, k1i, k1r = -a * S * I, a * S * I - b * I, b * I
    s2, i2 = S + h * k1s / 2, I + h * k1i / 2
    k2s, k2i, k2r = -a * s2 * i2, a * s2 * i2 - b * i2, b * i2
    s3, i3 = S + h * k2s / 2, I + h * k2i / 2
    k3s, k3i, k3r = -a * s3 * i3, a * s3 * i3 - b * i3, b * i3
    s4, i4 = S + h * k3s, I + h * k3i
    k4s, k4i, k4r = -a * s4 * i4, a * s4 * i4 - b * i4, b * i4
    expected = [
        S + h / 6 * (k1s + 2 * k2s + 2 * k3s + k4s),
        I + h / 6 * (k1i + 2 * k2i + 2 * k3i + k4i),
        R + h / 6 * (k1r + 2 * k2r + 2 * k3r + k4r),
    ]
    assert _same(rk4_step(_sym_sir, 0, y, h), expected)


def test_pc_expands_to_per_compartment_form():
    y = np.array([S, I, R], dtype=object)
    f = lambda s, i: -a * s * i
    g = lambda s, i: a * s * i - b * i
    u = lambda i: b * i
    sp_, ip_ = S + h * f(S, I), I + h * g(S, I)
    expected = [
        S + h / 2 * (f(S, I) + f(sp_, ip_)),
        I + h / 2 * (g(S, I) + g(sp_, ip_)),
        R + h / 2 * (u(I) + u(ip_)),
    ]
    assert _same(pc_step(_sym_sir, 0, y, h), expected)


# ------------------------------------------------ whole-trajectory properties

@pytest.mark.parametrize("model", ["si", "sir"])
@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("step", DEFAULT_STEPS)
def test_kernels_match_generic_solver_bitwise(model, method, step, backend):
    params, y0 = default_params(model), default_initial_state(model)
    grid = make_grid(0, 14, step)
    fast = kernels.simulate(params, method, y0, grid, backend)
    generic = solve(method, params.rhs, y0, grid)
    np.testing.assert_array_equal(fast.states, generic.states)
    np.testing.assert_array_equal(fast.states[0], y0)


@pytest.mark.parametrize("model", ["si", "sir"])
@pytest.mark.parametrize("method", METHODS)
def test_conservation_on_default_grid(model, method, backend):
    params, y0 = default_params(model), default_initial_state(model)
    for step in DEFAULT_STEPS:
        tr = kernels.simulate(params, method, y0, make_grid(0, 14, step), backend)
        assert np.max(np.abs(tr.states.sum(axis=1) - 763)) <= 1e-9 * 763


@settings(max_examples=40, deadline=None)
@given(
    alpha=st.floats(1e-5, 2e-3),
    s0=st.floats(1, 1000),
    i0=st.floats(0, 100),
    method=st.sampled_from(METHODS),
    step=st.sampled_from(DEFAULT_STEPS),
)
def test_si_conservation_property(alpha, s0, i0, method, step):
    total = s0 + i0
    # keep alpha*N*h moderate so explicit steps stay stable
    alpha = min(alpha, 0.5 / (total * step))
    tr = kernels.simulate(SiParams(alpha), method, [s0, i0], make_grid(0, 14, step))
    assert np.max(np.abs(tr.states.sum(axis=1) - total)) <= 1e-9 * total


def test_determinism():
    grid = make_grid(0, 14, 0.01)
    first = rk4_solve(SIR.rhs, default_initial_state("sir"), grid).states
    second = rk4_solve(SIR.rhs, default_initial_state("sir"), grid).states
    assert first.tobytes() == second.tobytes()


def _max_error(method, step):
    y0 = default_initial_state("si")
    grid = make_grid(0, 14, step)
    return np.max(np.abs(kernels.simulate(SI, method, y0, grid).states - exact_trajectory(SI, y0, grid).states))


@pytest.mark.parametrize("method, lo, hi", [("euler", 0.8, 1.2), ("pc", 1.7, 2.3), ("rk4", 3.5, 4.5)])
def test_convergence_order(method, lo, hi):
    steps = [0.2, 0.1, 0.05, 0.025]
    errors = [_max_error(method, s) for s in steps]
    assert min(errors) > 1e-10 * 763  # still above roundoff
    slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
    assert lo <= slope <= hi


@pytest.mark.parametrize("method", METHODS)
def test_accuracy_improves_with_smaller_steps(method):
    y0 = default_initial_state("si")
    r2 = []
    for step in (0.25, 0.10, 0.01):
        grid = make_grid(0, 14, step)
        tr = kernels.simulate(SI, method, y0, grid)
        r2.append(r_squared(exact_trajectory(SI, y0, grid).states[:, 1], tr.states[:, 1]))
    assert r2[2] >= r2[1] >= r2[0]


def test_non_finite_state_reported_with_partial_trajectory(backend):
    blowup = SiParams(1e300)
    grid = make_grid(0, 1, 0.25)
    with pytest.raises(NonFiniteStateError) as info:
        kernels.simulate(blowup, "euler", [1e10, 1e10], grid, backend)
    assert info.value.node == 1
    assert info.value.partial.shape == (2, 2)
    np.testing.assert_array_equal(info.value.partial[0], [1e10, 1e10])


def test_generic_solver_reports_non_finite():
    def rhs(t, y):
        return y * (np.inf if t >= 0.5 else 1.0)

    with pytest.raises(NonFiniteStateError) as info:
        euler_solve(rhs, [1.0], make_grid(0, 1, 0.25))
    assert info.value.node == 3
    assert len(info.value.partial) == 4


def test_unknown_method():
    with pytest.raises(ValueError):
        solve("adams", SI.rhs, [1, 1], make_grid(0, 1, 0.5))
    with pytest.raises(ValueError):
        kernels.simulate(SI, "adams", [1, 1], make_grid(0, 1, 0.5))


def test_backend_selection():
    assert "python" in kernels.available_backends()
    assert kernels.DEFAULT_BACKEND in kernels.available_backends()
    with pytest.raises(ValueError):
        kernels.simulate(SI, "euler", [1, 1], make_grid(0, 1, 0.5), "fortran")
