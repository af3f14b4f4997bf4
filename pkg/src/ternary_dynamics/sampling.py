"""Finite-sample layer: multinomial resampling of the clamped dynamics.

Each stochastic stage first moves to the deterministic clamped target and
then replaces it by the empirical frequencies of ``n`` independent
category draws, so the expected next state equals the deterministic one
and the noise shrinks like ``n**-0.5``.  Replication ``r`` of a run draws
from the counter-based Philox stream keyed by ``(seed, r)``, which makes
runs bit-reproducible and replications independent without any shared
generator state.
"""

import statistics
from dataclasses import dataclass, replace

import numpy as np

from ._parallel import ordered_map
from .core import (
    InvalidInputError,
    ModelError,
    SimplexPoint,
    _clamped_step,
    _count,
    build_regression_matrix,
    step_clamped,
    trajectory,
)


@dataclass(frozen=True)
class SampleConfig:
    """Settings for stochastic replication runs."""

    sample_volume: int
    replications: int
    seed: int
    steps: int

    def __post_init__(self):
        for name in ("sample_volume", "replications", "seed", "steps"):
            object.__setattr__(self, name, _count(getattr(self, name), name))
        if self.sample_volume < 1:
            raise InvalidInputError(f"sample_volume must be >= 1, got {self.sample_volume}")
        if self.replications < 1:
            raise InvalidInputError(f"replications must be >= 1, got {self.replications}")
        if self.steps < 0:
            raise InvalidInputError(f"steps must be >= 0, got {self.steps}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class EmpiricalTrajectory:
    """Frequencies observed along one stochastic replication.

    Stage 0 is the exact initial point; every later stage is integer draw
    counts over the sample volume.
    """

    replication: int
    seed: int
    sample_volume: int
    init: tuple
    counts: tuple

    @property
    def points(self):
        """Frequency triples for stages 0..steps."""
        n = self.sample_volume
        return (self.init,) + tuple((c0 / n, c1 / n, c2 / n) for c0, c1, c2 in self.counts)


def replication_stream(seed, replication):
    """Independent generator for one replication, keyed by (seed, replication)."""
    return np.random.Generator(np.random.Philox(key=[seed, replication]))


def stochastic_step(params, freq, n, rng):
    """One stochastic stage: clamped target, then empirical frequencies of n draws."""
    n = _count(n, "sample volume")
    if n < 1:
        raise InvalidInputError(f"sample volume must be >= 1, got {n}")
    target = step_clamped(params, freq)
    counts = rng.multinomial(n, (target.p0, target.p1, target.p2))
    return SimplexPoint(counts[0] / n, counts[1] / n, counts[2] / n)


def run_replications(params, init, cfg, max_workers=None):
    """Independent stochastic trajectories, one per replication.

    Identical ``(params, init, cfg)`` reproduce bit-identical output, for
    any worker count.  A failing replication does not abort the others;
    the first failure is re-raised once all replications have finished.
    """
    if not isinstance(init, SimplexPoint):
        init = SimplexPoint(init.p0, init.p1, init.p2)
    rows = build_regression_matrix(params).rows
    n = cfg.sample_volume

    def run_one(r):
        rng = replication_stream(cfg.seed, r)
        state = (init.p0, init.p1, init.p2)
        counts = []
        for k in range(cfg.steps):
            try:
                target = _clamped_step(rows, state)
            except ModelError as exc:
                return type(exc)(f"replication {r}, step {k + 1}: {exc}")
            drawn = rng.multinomial(n, target)
            counts.append((int(drawn[0]), int(drawn[1]), int(drawn[2])))
            state = (drawn[0] / n, drawn[1] / n, drawn[2] / n)
        return EmpiricalTrajectory(
            replication=r,
            seed=cfg.seed,
            sample_volume=n,
            init=(init.p0, init.p1, init.p2),
            counts=tuple(counts),
        )

    results = ordered_map(run_one, range(cfg.replications), max_workers=max_workers)
    for result in results:
        if isinstance(result, ModelError):
            raise result
    return tuple(results)


@dataclass(frozen=True)
class DeviationRow:
    """Median worst-case gap between stochastic and deterministic paths at one volume."""

    sample_volume: int
    median_max_deviation: float
    replications: int


def lln_diagnostic(params, init, volumes, cfg, max_workers=None):
    """Deviation table over increasing sample volumes.

    For each volume the deviation of a replication is the maximum over all
    stages and components of the absolute gap to the deterministic clamped
    trajectory; the table reports the median across replications.
    """
    volumes = [_count(n, "sample volume") for n in volumes]
    if not volumes:
        raise InvalidInputError("volumes must be nonempty")
    if any(n < 1 for n in volumes):
        raise InvalidInputError(f"sample volumes must be >= 1, got {volumes}")
    if any(b <= a for a, b in zip(volumes, volumes[1:])):
        raise InvalidInputError(f"volumes must be strictly increasing, got {volumes}")
    if not isinstance(init, SimplexPoint):
        init = SimplexPoint(init.p0, init.p1, init.p2)
    reference = [(s.p0, s.p1, s.p2) for s in trajectory(params, init, cfg.steps, mode="clamped")]

    rows = []
    for n in volumes:
        trajs = run_replications(params, init, replace(cfg, sample_volume=n), max_workers=max_workers)
        deviations = []
        for traj in trajs:
            worst = 0.0
            for point, ref in zip(traj.points, reference):
                for a, b in zip(point, ref):
                    gap = abs(a - b)
                    if gap > worst:
                        worst = gap
            deviations.append(worst)
        rows.append(DeviationRow(
            sample_volume=n,
            median_max_deviation=statistics.median(deviations),
            replications=cfg.replications,
        ))
    return rows
