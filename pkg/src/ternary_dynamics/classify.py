"""Limit-scenario classification and empirical limit estimation.

A coordinate ``m`` of the dynamics is classified from two quantities: the
directing parameter ``v_m`` and the equilibrium component ``rho_m``.  With
``rho_m`` inside (0, 1) the equilibrium is attractive (``v_m > 0``, the
coordinate converges to ``rho_m``) or repulsive (``v_m < 0``, it escapes to
0 or 1 depending on which side it starts).  With ``rho_m`` outside [0, 1]
the limit is 1 when ``v_m < 0`` (dominant) and 0 when ``v_m > 0``
(degenerate).  Boundary inputs (``v_m = 0`` or ``rho_m`` on {0, 1}) have no
scenario and raise :class:`BoundaryCaseError`.

Empirical limits are estimated by iterating the clamped stepper, and
:func:`sweep` tabulates classifications (optionally with simulated limits)
over a parameter grid.
"""

import enum
from dataclasses import dataclass

from ._parallel import ordered_map
from .core import (
    DegenerateClampError,
    DirectingParams,
    InvalidInputError,
    ModelError,
    NoEquilibriumError,
    SimplexPoint,
    _clamped_step,
    _count,
    build_regression_matrix,
    compute_equilibrium,
    contraction_factor,
)

BOUNDARY_TOL = 1e-12
DEFAULT_WINDOW = 10


class BoundaryCaseError(ModelError):
    """No scenario is assigned: v_m is zero or rho_m sits on {0, 1}."""

    def __init__(self, message, flags=(), rho_m=None, v_m=None):
        super().__init__(message)
        self.flags = tuple(flags)
        self.rho_m = rho_m
        self.v_m = v_m


class UnresolvedPredictionError(ModelError):
    """A repulsive prediction has no branch: the start sits exactly on the threshold."""


class Scenario(enum.Enum):
    ATTRACTIVE = "attractive"
    REPULSIVE = "repulsive"
    DOMINANT = "dominant"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class ScenarioReport:
    """Classification outcome for one coordinate.

    ``predicted_limit`` is ``None`` for the repulsive scenario, where the
    limit depends on the initial value; use :meth:`resolve_limit`.
    """

    coordinate: int
    scenario: Scenario
    rho_m: float
    v_m: float
    predicted_limit: float | None
    contraction_factor: float
    boundary_flags: frozenset = frozenset()

    def resolve_limit(self, initial_value):
        """Predicted limit given the coordinate's initial value."""
        if self.scenario is not Scenario.REPULSIVE:
            return self.predicted_limit
        if abs(initial_value - self.rho_m) <= BOUNDARY_TOL:
            raise UnresolvedPredictionError(
                f"initial value {initial_value!r} sits on the repulsive threshold {self.rho_m!r}"
            )
        return 1.0 if initial_value > self.rho_m else 0.0


@dataclass(frozen=True)
class LimitEstimate:
    """Terminal value of one coordinate under clamped iteration."""

    value: float
    converged: bool
    steps_used: int
    terminal_delta: float


@dataclass(frozen=True)
class AgreementCheck:
    """Comparison of a classified prediction against a simulated limit."""

    agree: bool
    predicted_limit: float
    estimated_limit: float
    difference: float


def _check_coordinate(coordinate):
    coordinate = _count(coordinate, "coordinate")
    if coordinate not in (0, 1, 2):
        raise InvalidInputError(f"coordinate must be 0, 1 or 2, got {coordinate}")
    return coordinate


def classify(params, coordinate=0):
    """Scenario of one coordinate from the sign of v_m and the location of rho_m."""
    coordinate = _check_coordinate(coordinate)
    eq = compute_equilibrium(params)
    v_m = tuple(params)[coordinate]
    rho_m = eq.rho[coordinate]
    flags = []
    if v_m == 0.0:
        flags.append("v_zero")
    if min(abs(rho_m), abs(rho_m - 1.0)) <= BOUNDARY_TOL:
        flags.append("rho_boundary")
    if flags:
        raise BoundaryCaseError(
            f"no scenario for coordinate {coordinate}: v_m = {v_m!r}, rho_m = {rho_m!r}",
            flags=flags,
            rho_m=rho_m,
            v_m=v_m,
        )
    if 0.0 < rho_m < 1.0:
        scenario = Scenario.ATTRACTIVE if v_m > 0.0 else Scenario.REPULSIVE
        predicted = rho_m if scenario is Scenario.ATTRACTIVE else None
    else:
        scenario = Scenario.DOMINANT if v_m < 0.0 else Scenario.DEGENERATE
        predicted = 1.0 if scenario is Scenario.DOMINANT else 0.0
    return ScenarioReport(
        coordinate=coordinate,
        scenario=scenario,
        rho_m=rho_m,
        v_m=v_m,
        predicted_limit=predicted,
        contraction_factor=contraction_factor(params),
    )


def estimate_limit(params, init, coordinate=0, tol=1e-10, max_steps=10000, window=DEFAULT_WINDOW):
    """Empirical limit of one coordinate under clamped iteration.

    Convergence is declared after ``window`` consecutive steps whose
    sup-norm increment stays within ``tol``, or immediately at an exact
    fixed point (absorbing vertices included).  Exhausting ``max_steps``
    reports ``converged=False`` rather than raising.
    """
    coordinate = _check_coordinate(coordinate)
    if not tol > 0.0:
        raise InvalidInputError(f"tol must be positive, got {tol!r}")
    max_steps = _count(max_steps, "max_steps")
    window = _count(window, "window")
    if max_steps < 1 or window < 1:
        raise InvalidInputError("max_steps and window must be >= 1")
    if not isinstance(init, SimplexPoint):
        init = SimplexPoint(init.p0, init.p1, init.p2)
    rows = build_regression_matrix(params).rows
    state = (init.p0, init.p1, init.p2)
    quiet = 0
    delta = float("inf")
    for k in range(1, max_steps + 1):
        nxt = _clamped_step(rows, state)
        delta = max(abs(nxt[0] - state[0]), abs(nxt[1] - state[1]), abs(nxt[2] - state[2]))
        state = nxt
        if delta == 0.0:
            return LimitEstimate(state[coordinate], True, k, delta)
        quiet = quiet + 1 if delta <= tol else 0
        if quiet >= window:
            return LimitEstimate(state[coordinate], True, k, delta)
    return LimitEstimate(state[coordinate], False, max_steps, delta)


def check_agreement(report, estimate, init, tol=1e-6):
    """Compare a classified prediction against a simulated limit.

    The repulsive prediction is resolved against the coordinate's initial
    value; exact threshold starts raise :class:`UnresolvedPredictionError`.
    """
    if not tol > 0.0:
        raise InvalidInputError(f"tol must be positive, got {tol!r}")
    predicted = report.resolve_limit(tuple(init)[report.coordinate])
    difference = abs(estimate.value - predicted)
    return AgreementCheck(
        agree=difference <= tol,
        predicted_limit=predicted,
        estimated_limit=estimate.value,
        difference=difference,
    )


@dataclass(frozen=True)
class SweepRow:
    """One grid cell of a scenario sweep."""

    v0: float
    v1: float
    v2: float
    coordinate: int
    rho_m: float | None
    v_m: float | None
    scenario: str
    predicted_limit: float | None
    contraction_factor: float | None
    simulated_limit: float | None
    agreement: str | None
    flags: tuple


def grid_cells(v0_values, v1_values, v2_values):
    """Cartesian parameter grid, v0 outermost and v2 innermost."""
    return [(a, b, c) for a in v0_values for b in v1_values for c in v2_values]


def _evaluate_cell(cell, coordinate, init, simulate, bound_check, tol, max_steps, agreement_tol):
    v0, v1, v2 = cell
    flags = set()

    def row(scenario, rho_m=None, v_m=None, predicted=None, contraction=None,
            simulated=None, agreement=None):
        return SweepRow(
            v0=v0, v1=v1, v2=v2, coordinate=coordinate,
            rho_m=rho_m, v_m=v_m, scenario=scenario,
            predicted_limit=predicted, contraction_factor=contraction,
            simulated_limit=simulated, agreement=agreement,
            flags=tuple(sorted(flags)),
        )

    try:
        params = DirectingParams(v0, v1, v2, bound_check=bound_check)
    except InvalidInputError:
        return row("invalid_params", v_m=cell[coordinate])
    if not params.in_model_range:
        flags.add("params_out_of_range")
    contraction = contraction_factor(params)
    v_m = tuple(params)[coordinate]

    try:
        report = classify(params, coordinate)
    except NoEquilibriumError:
        return row("no_equilibrium", v_m=v_m, contraction=contraction)
    except BoundaryCaseError as exc:
        flags.update(exc.flags)
        return row("boundary", rho_m=exc.rho_m, v_m=v_m, contraction=contraction)

    try:
        predicted = report.resolve_limit(tuple(init)[coordinate])
    except UnresolvedPredictionError:
        flags.add("unresolved_prediction")
        predicted = None

    simulated = agreement = None
    if simulate:
        try:
            estimate = estimate_limit(params, init, coordinate, tol=tol, max_steps=max_steps)
        except DegenerateClampError:
            flags.add("degenerate_clamp")
        else:
            simulated = estimate.value
            if not estimate.converged:
                flags.add("not_converged")
            if predicted is not None:
                agreement = "agree" if abs(simulated - predicted) <= agreement_tol else "disagree"

    return row(
        report.scenario.value,
        rho_m=report.rho_m,
        v_m=v_m,
        predicted=predicted,
        contraction=contraction,
        simulated=simulated,
        agreement=agreement,
    )


def sweep(cells, coordinate=0, init=SimplexPoint(1 / 3, 1 / 3, 1 / 3), simulate=False, *,
          bound_check=True, tol=1e-10, max_steps=10000, agreement_tol=1e-6, max_workers=None):
    """Classify every parameter triple in ``cells``; one row per cell, in input order.

    Cell-level failures become row markers (``no_equilibrium``, ``boundary``,
    ``invalid_params``) instead of aborting the sweep.  With ``simulate``
    the clamped limit is also estimated and compared to the prediction.
    Output is deterministic for a given grid and initial point, independent
    of the worker count.
    """
    coordinate = _check_coordinate(coordinate)
    if not isinstance(init, SimplexPoint):
        init = SimplexPoint(init.p0, init.p1, init.p2)
    prepared = []
    for cell in cells:
        triple = tuple(float(x) for x in cell)
        if len(triple) != 3:
            raise InvalidInputError(f"grid cells must be triples, got {cell!r}")
        prepared.append(triple)

    def job(triple):
        return _evaluate_cell(
            triple, coordinate, init, simulate, bound_check, tol, max_steps, agreement_tol
        )

    return ordered_map(job, prepared, max_workers=max_workers)
