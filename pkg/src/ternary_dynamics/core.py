"""State types and one-step dynamics of a ternary statistical experiment.

The model tracks a triple of probabilities over discrete stages.  Stage
increments are linear in the current state: the next state is
``p - M @ p`` where ``M`` is the 3x3 regression matrix generated by the
directing action parameters ``(v0, v1, v2)``.  Every column of ``M`` sums
to zero, so the total mass ``p0 + p1 + p2`` is conserved, but individual
components may leave ``[0, 1]``.  Two steppers are provided:

* :func:`step_raw` applies the linear map as-is (components unconstrained);
* :func:`step_clamped` clips the result to ``[0, 1]``, renormalises, and
  snaps near-vertex states to the exact absorbing unit vector, so boundary
  limits 0 and 1 are reachable.
"""

import math
import operator
from dataclasses import InitVar, dataclass

BALANCE_TOL = 1e-12
SINGULAR_REL_TOL = 1e-14
ABSORB_EPS = 1e-9


class ModelError(Exception):
    """Base class for domain errors raised by this package."""


class InvalidInputError(ModelError, ValueError):
    """Parameters, states or configuration violate a construction invariant."""


class NoEquilibriumError(ModelError):
    """No unique equilibrium: the denominator v1*v2 + v0*v2 + v0*v1 vanishes."""


class DegenerateClampError(ModelError):
    """A clamped step clipped away all probability mass."""


def _coerce_floats(obj, names):
    for name in names:
        object.__setattr__(obj, name, float(getattr(obj, name)))
    values = tuple(getattr(obj, name) for name in names)
    if not all(math.isfinite(v) for v in values):
        raise InvalidInputError(f"{type(obj).__name__} components must be finite, got {values}")
    return values


@dataclass(frozen=True)
class DirectingParams:
    """Directing action parameters (v0, v1, v2).

    The model assumes ``|v_m| <= 1``; construction enforces the bound.
    Pass ``bound_check=False`` for exploratory runs outside it (reports
    downstream flag such parameter sets).
    """

    v0: float
    v1: float
    v2: float
    bound_check: InitVar[bool] = True

    def __post_init__(self, bound_check):
        values = _coerce_floats(self, ("v0", "v1", "v2"))
        if bound_check and not self.in_model_range:
            raise InvalidInputError(
                f"directing parameters must satisfy |v_m| <= 1, got {values}; "
                "pass bound_check=False to run outside the model range"
            )

    @property
    def in_model_range(self):
        """True when every parameter lies in [-1, 1]."""
        return max(abs(self.v0), abs(self.v1), abs(self.v2)) <= 1.0

    def __iter__(self):
        yield self.v0
        yield self.v1
        yield self.v2


@dataclass(frozen=True)
class SimplexPoint:
    """A probability triple: components in [0, 1] summing to 1."""

    p0: float
    p1: float
    p2: float

    def __post_init__(self):
        values = _coerce_floats(self, ("p0", "p1", "p2"))
        if any(p < 0.0 or p > 1.0 for p in values):
            raise InvalidInputError(f"probabilities must lie in [0, 1], got {values}")
        total = self.p0 + self.p1 + self.p2
        if abs(total - 1.0) > BALANCE_TOL:
            raise InvalidInputError(f"probabilities must sum to 1, got sum {total!r}")

    def __iter__(self):
        yield self.p0
        yield self.p1
        yield self.p2


@dataclass(frozen=True)
class RawState:
    """A sum-one triple whose components may leave [0, 1].

    The unclamped linear dynamics conserves only the total, so diverging
    trajectories produce components of large magnitude; the balance check
    scales with that magnitude to stay meaningful in double precision.
    """

    p0: float
    p1: float
    p2: float

    def __post_init__(self):
        values = _coerce_floats(self, ("p0", "p1", "p2"))
        total = self.p0 + self.p1 + self.p2
        tol = BALANCE_TOL * max(1.0, *map(abs, values))
        if abs(total - 1.0) > tol:
            raise InvalidInputError(f"components must sum to 1, got sum {total!r}")

    def __iter__(self):
        yield self.p0
        yield self.p1
        yield self.p2


@dataclass(frozen=True)
class FluctuationVector:
    """Deviation of a state from equilibrium; components sum to 0."""

    f0: float
    f1: float
    f2: float

    def __post_init__(self):
        values = _coerce_floats(self, ("f0", "f1", "f2"))
        tol = BALANCE_TOL * max(1.0, *map(abs, values))
        if abs(self.f0 + self.f1 + self.f2) > tol:
            raise InvalidInputError(
                f"fluctuations must sum to 0, got sum {self.f0 + self.f1 + self.f2!r}"
            )

    def __iter__(self):
        yield self.f0
        yield self.f1
        yield self.f2


@dataclass(frozen=True)
class RegressionMatrix:
    """3x3 increment-regression matrix; built matrices have zero column sums."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(float(x) for x in row) for row in self.rows)
        if len(rows) != 3 or any(len(row) != 3 for row in rows):
            raise InvalidInputError("regression matrix must be 3x3")
        if not all(math.isfinite(x) for row in rows for x in row):
            raise InvalidInputError("regression matrix entries must be finite")
        object.__setattr__(self, "rows", rows)

    def apply(self, vec):
        """Matrix-vector product; each row is evaluated left to right."""
        x0, x1, x2 = vec
        return tuple(row[0] * x0 + row[1] * x1 + row[2] * x2 for row in self.rows)

    def column_sums(self):
        return tuple(self.rows[0][n] + self.rows[1][n] + self.rows[2][n] for n in range(3))


@dataclass(frozen=True)
class Equilibrium:
    """Stationary triple: the increment regression vanishes there.

    Components sum to 1 but may individually leave [0, 1].
    """

    rho0: float
    rho1: float
    rho2: float
    v_denominator: float
    params: DirectingParams

    def __post_init__(self):
        values = _coerce_floats(self, ("rho0", "rho1", "rho2", "v_denominator"))
        total = self.rho0 + self.rho1 + self.rho2
        tol = BALANCE_TOL * max(1.0, *map(abs, values[:3]))
        if abs(total - 1.0) > tol:
            raise InvalidInputError(f"equilibrium components must sum to 1, got sum {total!r}")

    @property
    def rho(self):
        return (self.rho0, self.rho1, self.rho2)

    @property
    def v_bar(self):
        """Sum of reciprocal directing parameters; defined only when all are nonzero."""
        v0, v1, v2 = self.params
        if v0 == 0.0 or v1 == 0.0 or v2 == 0.0:
            raise InvalidInputError("v_bar is undefined when a directing parameter is zero")
        return 1.0 / v0 + 1.0 / v1 + 1.0 / v2


def build_regression_matrix(params):
    """Matrix with diagonal entries 2*v_m and column-n off-diagonal entries -v_n."""
    v0, v1, v2 = params
    return RegressionMatrix(
        rows=(
            (2.0 * v0, -v1, -v2),
            (-v0, 2.0 * v1, -v2),
            (-v0, -v1, 2.0 * v2),
        )
    )


def compute_equilibrium(params):
    """Closed-form equilibrium (v1*v2, v0*v2, v0*v1) / (v1*v2 + v0*v2 + v0*v1).

    Raises :class:`NoEquilibriumError` when the denominator is zero relative
    to the largest pairwise product, so catastrophic cancellation never
    manufactures a spurious equilibrium.
    """
    v0, v1, v2 = params
    p12 = v1 * v2
    p02 = v0 * v2
    p01 = v0 * v1
    denom = p12 + p02 + p01
    scale = max(abs(p12), abs(p02), abs(p01))
    if abs(denom) <= SINGULAR_REL_TOL * scale:
        raise NoEquilibriumError(
            f"no unique equilibrium: V = {denom!r} (v1*v2 + v0*v2 + v0*v1 vanishes)"
        )
    return Equilibrium(
        rho0=p12 / denom,
        rho1=p02 / denom,
        rho2=p01 / denom,
        v_denominator=denom,
        params=params,
    )


def to_fluctuation(state, eq):
    """Componentwise deviation of a state from the equilibrium."""
    return FluctuationVector(state.p0 - eq.rho0, state.p1 - eq.rho1, state.p2 - eq.rho2)


def _raw_step(rows, p):
    x0, x1, x2 = p
    return tuple(
        x - (row[0] * x0 + row[1] * x1 + row[2] * x2) for x, row in zip(p, rows)
    )


def _clamped_step(rows, p):
    q = _raw_step(rows, p)
    clipped = tuple(min(1.0, max(0.0, x)) for x in q)
    total = clipped[0] + clipped[1] + clipped[2]
    if total <= 0.0:
        raise DegenerateClampError(
            f"clamping removed all probability mass (clipped sum {total!r})"
        )
    renormed = (clipped[0] / total, clipped[1] / total, clipped[2] / total)
    for m in range(3):
        if renormed[m] >= 1.0 - ABSORB_EPS:
            return tuple(1.0 if n == m else 0.0 for n in range(3))
    return renormed


def step_raw(params, state):
    """One unclamped linear step; conserves the component sum only."""
    rows = build_regression_matrix(params).rows
    return RawState(*_raw_step(rows, (state.p0, state.p1, state.p2)))


def step_clamped(params, state):
    """One step projected back onto the probability simplex.

    Out-of-range components are clipped to [0, 1] and the result is
    renormalised; a coordinate within ``ABSORB_EPS`` of 1 is snapped to the
    exact unit vector, which the dynamics then treats as absorbing.
    """
    if not isinstance(state, SimplexPoint):
        state = SimplexPoint(state.p0, state.p1, state.p2)
    rows = build_regression_matrix(params).rows
    return SimplexPoint(*_clamped_step(rows, (state.p0, state.p1, state.p2)))


def _count(value, what):
    try:
        value = operator.index(value)
    except TypeError:
        raise InvalidInputError(f"{what} must be an integer, got {value!r}") from None
    return value


def trajectory(params, init, steps, mode="raw"):
    """States of stages 0..steps under repeated stepping.

    ``mode`` selects the stepper: ``"raw"`` keeps the literal linear
    dynamics (elements are :class:`RawState`), ``"clamped"`` keeps the
    trajectory on the simplex (elements are :class:`SimplexPoint`).
    Step failures are re-raised with the failing stage index attached.
    """
    steps = _count(steps, "steps")
    if steps < 0:
        raise InvalidInputError(f"steps must be >= 0, got {steps}")
    if mode not in ("raw", "clamped"):
        raise InvalidInputError(f"mode must be 'raw' or 'clamped', got {mode!r}")
    rows = build_regression_matrix(params).rows
    if mode == "clamped":
        first = init if isinstance(init, SimplexPoint) else SimplexPoint(init.p0, init.p1, init.p2)
        wrap, advance = SimplexPoint, _clamped_step
    else:
        first = init if isinstance(init, RawState) else RawState(init.p0, init.p1, init.p2)
        wrap, advance = RawState, _raw_step
    out = [first]
    p = (first.p0, first.p1, first.p2)
    for k in range(steps):
        try:
            p = advance(rows, p)
            out.append(wrap(*p))
        except ModelError as exc:
            raise type(exc)(f"step {k + 1}: {exc}") from exc
    return out


def reduced_matrix(params):
    """2x2 increment matrix for the first two fluctuation components.

    The third component is eliminated through the zero-sum balance, so one
    reduced step reproduces the (f0, f1) part of a full linear step.
    """
    v0, v1, v2 = params
    return (
        (-(2.0 * v0 + v2), v1 - v2),
        (v0 - v2, -(2.0 * v1 + v2)),
    )


def contraction_factor(params):
    """Spectral radius of the one-step map on the zero-sum fluctuation plane.

    A value below 1 means the unclamped iteration converges to the
    equilibrium from every start.
    """
    (a, b), (c, d) = reduced_matrix(params)
    a, d = a + 1.0, d + 1.0
    tr = a + d
    det = a * d - b * c
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        root = math.sqrt(disc)
        return max(abs((tr + root) / 2.0), abs((tr - root) / 2.0))
    return math.sqrt(det)
