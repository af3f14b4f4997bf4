import math

import numpy as np
import pytest

from ternary_dynamics import (
    DegenerateClampError,
    DirectingParams,
    FluctuationVector,
    InvalidInputError,
    NoEquilibriumError,
    RawState,
    SimplexPoint,
    build_regression_matrix,
    compute_equilibrium,
    contraction_factor,
    reduced_matrix,
    step_clamped,
    step_raw,
    to_fluctuation,
    trajectory,
)
from ternary_dynamics.core import _clamped_step


def random_simplex(rng):
    p = rng.uniform(0.0, 1.0, size=3)
    p = p / p.sum()
    return RawState(p[0], p[1], p[2])


# ---------------------------------------------------------------- parameters

def test_params_reject_out_of_range():
    with pytest.raises(InvalidInputError):
        DirectingParams(2.0, 1.0, 1.0)
    with pytest.raises(InvalidInputError):
        DirectingParams(0.0, -1.5, 0.0)


def test_params_bound_bypass_flag():
    params = DirectingParams(2.0, 1.0, 1.0, bound_check=False)
    assert not params.in_model_range
    assert DirectingParams(1.0, -1.0, 0.5).in_model_range


def test_params_reject_nonfinite():
    with pytest.raises(InvalidInputError):
        DirectingParams(float("nan"), 0.0, 0.0)
    with pytest.raises(InvalidInputError):
        DirectingParams(float("inf"), 0.0, 0.0, bound_check=False)


# ------------------------------------------------------------- state types

def test_simplex_point_validation():
    SimplexPoint(0.5, 0.3, 0.2)
    with pytest.raises(InvalidInputError):
        SimplexPoint(0.5, 0.3, 0.3)
    with pytest.raises(InvalidInputError):
        SimplexPoint(-0.1, 0.6, 0.5)
    with pytest.raises(InvalidInputError):
        SimplexPoint(1.2, -0.1, -0.1)


def test_raw_state_allows_out_of_range_components():
    state = RawState(1.5, -0.25, -0.25)
    assert tuple(state) == (1.5, -0.25, -0.25)
    with pytest.raises(InvalidInputError):
        RawState(0.5, 0.3, 0.3)


def test_raw_state_balance_tolerance_scales_with_magnitude():
    # integers up to 2**53 are exact, so this large state sums to 1 exactly
    RawState(2e6, -1e6, -999999.0)
    with pytest.raises(InvalidInputError):
        RawState(2e6, -1e6, -999999.5)


def test_fluctuation_vector_balance():
    FluctuationVector(0.2, -0.1, -0.1)
    with pytest.raises(InvalidInputError):
        FluctuationVector(0.2, 0.1, 0.1)


# -------------------------------------------------------- regression matrix

def test_matrix_all_zero_params():
    m = build_regression_matrix(DirectingParams(0.0, 0.0, 0.0))
    assert m.rows == ((0.0, 0.0, 0.0),) * 3


def test_matrix_symmetric_unit_params():
    m = build_regression_matrix(DirectingParams(1.0, 1.0, 1.0))
    for i in range(3):
        for j in range(3):
            assert m.rows[i][j] == (2.0 if i == j else -1.0)
    assert m.column_sums() == (0.0, 0.0, 0.0)


def test_matrix_hand_built_rows():
    m = build_regression_matrix(DirectingParams(0.5, 1.0, 1.0))
    assert m.rows == ((1.0, -1.0, -1.0), (-0.5, 2.0, -1.0), (-0.5, -1.0, 2.0))


def test_matrix_column_sums_exactly_zero_random():
    rng = np.random.default_rng(101)
    for _ in range(500):
        v = rng.uniform(-1.0, 1.0, size=3)
        m = build_regression_matrix(DirectingParams(*v))
        assert m.column_sums() == (0.0, 0.0, 0.0)


def test_matrix_apply_is_row_dot_product():
    m = build_regression_matrix(DirectingParams(0.1, 0.1, 0.1))
    assert m.apply((0.5, 0.3, 0.2)) == pytest.approx((0.05, -0.01, -0.04), abs=1e-15)


# -------------------------------------------------------------- equilibrium

def test_equilibrium_symmetric_params():
    eq = compute_equilibrium(DirectingParams(1.0, 1.0, 1.0))
    assert eq.rho == pytest.approx((1 / 3, 1 / 3, 1 / 3), abs=1e-15)
    assert eq.v_denominator == 3.0


def test_equilibrium_hand_substituted():
    eq = compute_equilibrium(DirectingParams(0.5, 1.0, 1.0))
    assert eq.rho == (0.5, 0.25, 0.25)
    assert eq.v_denominator == 2.0
    m = build_regression_matrix(eq.params)
    assert max(map(abs, m.apply(eq.rho))) <= 1e-12


def test_equilibrium_components_may_leave_unit_interval():
    eq = compute_equilibrium(DirectingParams(0.3, -0.1, 0.2))
    assert eq.v_denominator == pytest.approx(0.01, abs=1e-15)
    assert eq.rho == pytest.approx((-2.0, 6.0, -3.0), abs=1e-12)
    assert eq.rho0 + eq.rho1 + eq.rho2 == pytest.approx(1.0, abs=1e-12)


def test_equilibrium_singular_denominator():
    with pytest.raises(NoEquilibriumError, match="V = 0"):
        compute_equilibrium(DirectingParams(-0.1, 0.2, 0.2))
    with pytest.raises(NoEquilibriumError):
        compute_equilibrium(DirectingParams(0.0, 0.0, 0.0))
    with pytest.raises(NoEquilibriumError):
        compute_equilibrium(DirectingParams(0.2, 0.0, 0.0))


def test_v_bar_accessor():
    eq = compute_equilibrium(DirectingParams(0.5, 1.0, 1.0))
    assert eq.v_bar == pytest.approx(4.0, abs=1e-14)
    zero_param = compute_equilibrium(DirectingParams(0.1, 0.0, 0.1))
    with pytest.raises(InvalidInputError):
        zero_param.v_bar


# -------------------------------------------------------------- fluctuations

def test_fluctuation_at_equilibrium_is_zero():
    eq = compute_equilibrium(DirectingParams(0.5, 1.0, 1.0))
    f = to_fluctuation(RawState(*eq.rho), eq)
    assert tuple(f) == (0.0, 0.0, 0.0)


def test_fluctuation_componentwise_subtraction():
    eq = compute_equilibrium(DirectingParams(1.0, 1.0, 1.0))
    f = to_fluctuation(RawState(0.5, 0.3, 0.2), eq)
    assert tuple(f) == pytest.approx((1 / 6, -1 / 30, -2 / 15), abs=1e-15)


def test_fluctuation_balance_random():
    rng = np.random.default_rng(102)
    done = 0
    while done < 300:
        v = rng.uniform(-1.0, 1.0, size=3)
        if abs(v[1] * v[2] + v[0] * v[2] + v[0] * v[1]) <= 1e-6:
            continue
        done += 1
        eq = compute_equilibrium(DirectingParams(*v))
        f = to_fluctuation(random_simplex(rng), eq)
        assert abs(f.f0 + f.f1 + f.f2) <= 1e-12


# ------------------------------------------------------------------ stepping

def test_step_raw_worked_example():
    out = step_raw(DirectingParams(0.1, 0.1, 0.1), RawState(0.5, 0.3, 0.2))
    assert tuple(out) == pytest.approx((0.45, 0.31, 0.24), abs=1e-15)


def test_step_raw_with_zero_params_and_no_equilibrium():
    out = step_raw(DirectingParams(0.2, 0.0, 0.0), RawState(0.5, 0.25, 0.25))
    assert tuple(out) == pytest.approx((0.3, 0.35, 0.35), abs=1e-15)


def test_step_raw_fixed_point_at_equilibrium():
    eq = compute_equilibrium(DirectingParams(0.5, 1.0, 1.0))
    out = step_raw(eq.params, RawState(*eq.rho))
    assert tuple(out) == pytest.approx(eq.rho, abs=1e-12)


def test_step_raw_conserves_sum_random():
    rng = np.random.default_rng(103)
    for _ in range(500):
        v = rng.uniform(-1.0, 1.0, size=3)
        out = step_raw(DirectingParams(*v), random_simplex(rng))
        assert abs(out.p0 + out.p1 + out.p2 - 1.0) <= 1e-12


def test_step_clamped_interior_matches_raw():
    params = DirectingParams(0.1, 0.1, 0.1)
    state = SimplexPoint(0.5, 0.3, 0.2)
    clamped = step_clamped(params, state)
    raw = step_raw(params, RawState(*state))
    assert tuple(clamped) == pytest.approx(tuple(raw), abs=1e-15)


def test_step_clamped_unit_vector_absorbs():
    out = step_clamped(DirectingParams(-0.2, 0.5, -0.4), SimplexPoint(1.0, 0.0, 0.0))
    assert tuple(out) == (1.0, 0.0, 0.0)


def test_step_clamped_fixed_point_at_interior_equilibrium():
    eq = compute_equilibrium(DirectingParams(0.5, 1.0, 1.0))
    out = step_clamped(eq.params, SimplexPoint(*eq.rho))
    assert tuple(out) == pytest.approx(eq.rho, abs=1e-12)


def test_step_clamped_repulsive_start_below_threshold_hits_zero():
    # threshold is rho0 ~ 0.909; starting below it the coordinate must fall
    params = DirectingParams(-0.2, 0.5, -0.4)
    states = trajectory(params, SimplexPoint(0.5, 0.25, 0.25), 10, mode="clamped")
    p0 = [s.p0 for s in states]
    assert p0[6] == 0.0
    assert all(b <= a for a, b in zip(p0[1:], p0[2:]))


def test_degenerate_clamp_guard():
    zero_rows = ((0.0, 0.0, 0.0),) * 3
    with pytest.raises(DegenerateClampError):
        _clamped_step(zero_rows, (-1.0, -1.0, -1.0))


# ---------------------------------------------------------------- trajectory

def test_trajectory_zero_steps():
    init = RawState(0.5, 0.3, 0.2)
    assert trajectory(DirectingParams(0.1, 0.1, 0.1), init, 0) == [init]


def test_trajectory_constant_at_equilibrium():
    eq = compute_equilibrium(DirectingParams(0.5, 1.0, 1.0))
    states = trajectory(eq.params, RawState(*eq.rho), 5)
    for s in states:
        assert tuple(s) == pytest.approx(eq.rho, abs=1e-12)


def test_trajectory_geometric_contraction():
    # symmetric params act on fluctuations as multiplication by 1 - 3v
    states = trajectory(DirectingParams(0.1, 0.1, 0.1), RawState(0.5, 0.3, 0.2), 20)
    f0 = (0.5 - 1 / 3, 0.3 - 1 / 3, 0.2 - 1 / 3)
    for k, s in enumerate(states):
        expected = tuple(1 / 3 + 0.7**k * f for f in f0)
        assert tuple(s) == pytest.approx(expected, abs=1e-12)


def test_trajectory_clamped_keeps_simplex():
    states = trajectory(
        DirectingParams(-0.2, 0.5, -0.4), SimplexPoint(0.5, 0.25, 0.25), 50, mode="clamped"
    )
    for s in states:
        assert isinstance(s, SimplexPoint)


def test_trajectory_argument_validation():
    params = DirectingParams(0.1, 0.1, 0.1)
    init = RawState(0.5, 0.3, 0.2)
    with pytest.raises(InvalidInputError):
        trajectory(params, init, -1)
    with pytest.raises(InvalidInputError):
        trajectory(params, init, 2.5)
    with pytest.raises(InvalidInputError):
        trajectory(params, init, 3, mode="bogus")
    with pytest.raises(InvalidInputError):
        trajectory(params, RawState(1.5, -0.25, -0.25), 3, mode="clamped")


# ----------------------------------------------------- reduced system

def test_reduced_matrix_examples():
    assert reduced_matrix(DirectingParams(0.0, 0.0, 0.0)) == ((0.0, 0.0), (0.0, 0.0))
    a = reduced_matrix(DirectingParams(0.1, 0.1, 0.1))
    assert a[0] == pytest.approx((-0.3, 0.0), abs=1e-15)
    assert a[1] == pytest.approx((0.0, -0.3), abs=1e-15)


def test_reduced_step_matches_full_step_random():
    rng = np.random.default_rng(104)
    for _ in range(500):
        v = rng.uniform(-1.0, 1.0, size=3)
        params = DirectingParams(*v)
        state = random_simplex(rng)
        V = v[1] * v[2] + v[0] * v[2] + v[0] * v[1]
        if abs(V) <= 1e-6:
            continue
        eq = compute_equilibrium(params)
        f = to_fluctuation(state, eq)
        (a, b), (c, d) = reduced_matrix(params)
        reduced = (f.f0 + (a * f.f0 + b * f.f1), f.f1 + (c * f.f0 + d * f.f1))
        full = step_raw(params, state)
        full_f = (full.p0 - eq.rho0, full.p1 - eq.rho1)
        assert abs(full_f[0] - reduced[0]) <= 1e-12
        assert abs(full_f[1] - reduced[1]) <= 1e-12


def test_contraction_factor_examples():
    assert contraction_factor(DirectingParams(0.1, 0.1, 0.1)) == pytest.approx(0.7, abs=1e-12)
    assert contraction_factor(DirectingParams(0.0, 0.0, 0.0)) == 1.0
    # |v_m| <= 1 does not imply the unclamped iteration contracts
    assert contraction_factor(DirectingParams(1.0, 1.0, 1.0)) == pytest.approx(2.0, abs=1e-12)


# ------------------------------------------------------- linear structure

def test_step_is_linear_on_fluctuations():
    rng = np.random.default_rng(105)
    params = DirectingParams(0.3, 0.2, 0.4)
    eq = compute_equilibrium(params)

    def image(f):
        state = RawState(eq.rho0 + f[0], eq.rho1 + f[1], eq.rho2 + f[2])
        out = step_raw(params, state)
        return (out.p0 - eq.rho0, out.p1 - eq.rho1, out.p2 - eq.rho2)

    for _ in range(200):
        a, b = rng.uniform(-2.0, 2.0, size=2)
        f = rng.uniform(-0.2, 0.2, size=2)
        g = rng.uniform(-0.2, 0.2, size=2)
        f = (f[0], f[1], -f[0] - f[1])
        g = (g[0], g[1], -g[0] - g[1])
        combined = tuple(a * x + b * y for x, y in zip(f, g))
        lhs = image(combined)
        fi, gi = image(f), image(g)
        rhs = tuple(a * x + b * y for x, y in zip(fi, gi))
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_symmetric_params_contract_fluctuations_exactly():
    rng = np.random.default_rng(106)
    for v in (0.05, 0.1, 0.2, 0.3, 0.5, 0.65):
        params = DirectingParams(v, v, v)
        factor = abs(1.0 - 3.0 * v)
        for _ in range(50):
            state = random_simplex(rng)
            out = step_raw(params, state)
            for before, after in zip(
                (state.p0 - 1 / 3, state.p1 - 1 / 3, state.p2 - 1 / 3),
                (out.p0 - 1 / 3, out.p1 - 1 / 3, out.p2 - 1 / 3),
            ):
                assert abs(abs(after) - factor * abs(before)) <= 1e-12
