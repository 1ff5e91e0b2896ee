"""
Finite-state Markov chain with time-dependent transition matrices.

Matrices are row-stochastic: ``Q_k[i, j] = P(X_{k+1} = j | X_k = i)``.
Under this convention the one-step conditional mean of the indicator
vector is ``E[X_{k+1} | X_k = e_i] = Q_k.T @ e_i`` (row ``i`` of ``Q_k``).

Regimes are 0-based throughout the Python API; the configuration file and
the command line translate to and from 1-based indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import NegativeEntry, PathBudgetExceeded, RowSumViolation, TimeOutOfRange, ValidationError
from .random import make_stream, uniforms
from .tolerances import DEFAULT_MAX_PATHS, STOCHASTIC_TOL


@dataclass(frozen=True, eq=False)
class TransitionSchedule:
    """
    Per-step transition matrices ``Q_0, Q_1, ...``.

    Attributes
    ----------
    matrices : ndarray, shape (L, N, N)
        ``matrices[k]`` moves the chain from time ``k`` to ``k + 1``.
    homogeneous : bool
        If True, ``matrices`` holds a single matrix reused at every time.
    """

    matrices: np.ndarray
    homogeneous: bool = False

    def __post_init__(self) -> None:
        mats = np.array(self.matrices, dtype=np.float64)
        if mats.ndim == 2:
            mats = mats[None]
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)
        if self.homogeneous and mats.shape[0] != 1:
            raise ValidationError("a homogeneous schedule holds exactly one matrix")

    @classmethod
    def constant(cls, matrix) -> "TransitionSchedule":
        """Time-homogeneous schedule, validated."""
        return validate_schedule(cls(np.asarray(matrix, dtype=np.float64)[None], homogeneous=True))

    @classmethod
    def from_list(cls, matrices: Sequence) -> "TransitionSchedule":
        """Time-inhomogeneous schedule ``Q_0, ..., Q_{L-1}``, validated."""
        return validate_schedule(cls(np.asarray(matrices, dtype=np.float64)))

    @property
    def num_regimes(self) -> int:
        return self.matrices.shape[1]

    @property
    def num_steps(self) -> int | None:
        """Number of distinct steps covered, ``None`` when homogeneous."""
        return None if self.homogeneous else self.matrices.shape[0]

    def covers(self, horizon: int) -> bool:
        """True if transitions up to time ``horizon - 1`` are defined."""
        return self.homogeneous or self.matrices.shape[0] >= horizon - 1

    def matrix(self, k: int) -> np.ndarray:
        if k < 0 or (not self.homogeneous and k >= self.matrices.shape[0]):
            raise TimeOutOfRange(
                f"no transition matrix for time {k} (schedule covers {self.matrices.shape[0]} steps)"
            )
        return self.matrices[0 if self.homogeneous else k]


@dataclass(frozen=True)
class ChainPath:
    """A realized regime sequence ``(i_k, ..., i_{T-1})`` starting at ``start_time``."""

    start_time: int
    states: tuple[int, ...]
    probability: float

    def __post_init__(self) -> None:
        if len(self.states) == 0:
            raise ValidationError("a chain path needs at least one state")
        object.__setattr__(self, "states", tuple(int(x) for x in self.states))

    @property
    def horizon(self) -> int:
        """Maturity ``T``: one past the last time covered by the path."""
        return self.start_time + len(self.states)

    def __len__(self) -> int:
        return len(self.states)


def validate_schedule(schedule: TransitionSchedule) -> TransitionSchedule:
    """Check every matrix is square, non-negative and row-stochastic.

    Raises
    ------
    NegativeEntry
        For the first negative entry found (scanning matrices in time order).
    RowSumViolation
        For the first row whose sum differs from 1 by more than 1e-12.
    """
    mats = schedule.matrices
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2] or mats.shape[1] < 1:
        raise ValidationError(f"transition matrices must be square N x N with N >= 1, got shape {mats.shape[1:]}")
    if mats.shape[0] < 1:
        raise ValidationError("a transition schedule needs at least one matrix")
    if not np.all(np.isfinite(mats)):
        raise ValidationError("transition matrices contain non-finite entries")
    for k, q in enumerate(mats):
        neg = np.argwhere(q < 0)
        if neg.size:
            i, j = neg[0]
            raise NegativeEntry(int(i), int(j), k, float(q[i, j]))
        sums = q.sum(axis=1)
        for i, total in enumerate(sums):
            if abs(total - 1.0) > STOCHASTIC_TOL:
                raise RowSumViolation(i, k, float(total))
    return schedule


def path_probability(schedule: TransitionSchedule, start_time: int, states: Sequence[int]) -> float:
    p = 1.0
    for offset in range(len(states) - 1):
        p *= schedule.matrix(start_time + offset)[states[offset], states[offset + 1]]
    return float(p)


def make_path(schedule: TransitionSchedule, start_time: int, states: Sequence[int]) -> ChainPath:
    """Build a :class:`ChainPath` whose probability is read off the schedule."""
    _check_regimes(schedule, states)
    return ChainPath(start_time, tuple(states), path_probability(schedule, start_time, states))


def step_distribution(schedule: TransitionSchedule, k: int, dist) -> np.ndarray:
    """Propagate a regime distribution one step: ``dist @ Q_k``."""
    dist = np.asarray(dist, dtype=np.float64)
    if dist.shape != (schedule.num_regimes,):
        raise ValidationError(f"distribution must have length {schedule.num_regimes}")
    if np.any(dist < 0) or abs(dist.sum() - 1.0) > STOCHASTIC_TOL:
        raise ValidationError("distribution must be non-negative and sum to 1")
    return dist @ schedule.matrix(k)


def simulate_regimes(
    schedule: TransitionSchedule,
    k0: int,
    i0,
    horizon: int,
    gen: np.random.Generator,
) -> np.ndarray:
    """Vectorized chain simulation.

    ``i0`` may be a scalar or an integer array of starting regimes (one per
    path). Returns an integer array of shape ``(num_paths, horizon - k0)``;
    column 0 is the start regime. One uniform is consumed per path per step.
    """
    start = np.atleast_1d(np.asarray(i0, dtype=np.int64))
    out = np.empty((start.size, horizon - k0), dtype=np.int64)
    out[:, 0] = start
    for col, t in enumerate(range(k0, horizon - 1)):
        cum = np.cumsum(schedule.matrix(t), axis=1)[:, :-1]
        u = uniforms(gen, start.size)
        out[:, col + 1] = (u[:, None] >= cum[out[:, col]]).sum(axis=1)
    return out


def simulate_chain(schedule: TransitionSchedule, k0: int, i0: int, horizon: int, rng_seed=None) -> ChainPath:
    """Sample one regime path ``(i_{k0}, ..., i_{horizon-1})`` starting from ``i0``."""
    if k0 >= horizon or k0 < 0:
        raise TimeOutOfRange(f"need 0 <= k0 < horizon, got k0={k0}, horizon={horizon}")
    if not schedule.covers(horizon):
        raise TimeOutOfRange(f"schedule does not reach horizon {horizon}")
    _check_regimes(schedule, [i0])
    states = simulate_regimes(schedule, k0, i0, horizon, make_stream(rng_seed))[0]
    return make_path(schedule, k0, states.tolist())


def count_paths(num_regimes: int, k0: int, horizon: int) -> int:
    return num_regimes ** (horizon - 1 - k0)


def enumerate_paths(
    schedule: TransitionSchedule,
    k0: int,
    i0: int,
    horizon: int,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> Iterator[ChainPath]:
    """Lazily yield every regime path from ``(k0, i0)`` up to ``horizon - 1``.

    Paths come out in lexicographic order of ``(i_{k0+1}, ..., i_{horizon-1})``;
    callers that reduce over them rely on that order. Memory use is
    O(horizon - k0) regardless of how many paths there are.

    Raises
    ------
    PathBudgetExceeded
        If ``N ** (horizon - 1 - k0) > max_paths``. Raised eagerly, before
        the first path is produced.
    """
    if horizon <= k0 or k0 < 0:
        raise TimeOutOfRange(f"need 0 <= k0 < horizon, got k0={k0}, horizon={horizon}")
    if not schedule.covers(horizon):
        raise TimeOutOfRange(f"schedule does not reach horizon {horizon}")
    _check_regimes(schedule, [i0])
    n = schedule.num_regimes
    total = count_paths(n, k0, horizon)
    if total > max_paths:
        raise PathBudgetExceeded(total, max_paths)
    return _enumerate(schedule, k0, i0, horizon)


def _enumerate(schedule, k0, i0, horizon) -> Iterator[ChainPath]:
    n = schedule.num_regimes
    mats = [schedule.matrix(t) for t in range(k0, horizon - 1)]
    for tail in itertools.product(range(n), repeat=horizon - 1 - k0):
        states = (i0,) + tail
        p = 1.0
        for t, q in enumerate(mats):
            p *= q[states[t], states[t + 1]]
        yield ChainPath(k0, states, float(p))


def _check_regimes(schedule: TransitionSchedule, states) -> None:
    n = schedule.num_regimes
    for s in states:
        if not 0 <= int(s) < n:
            raise ValidationError(f"regime {s} outside 0..{n - 1}")
