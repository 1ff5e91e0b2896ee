"""
Zero-coupon bond prices and yield curves.

The unconditional price at ``(k, s_k, i_k)`` is the probability-weighted sum
of conditional prices over every regime path ``(i_k, i_{k+1}, ..., i_{T-1})``.

Exact enumeration shares work between paths. The coefficient triple at time
``t`` depends only on the regimes from ``t`` to ``T - 1`` (a path suffix), so
the recursion is run over the reversed path tree: starting from maturity,
each level prepends one earlier regime and advances an array holding one
triple per suffix. Flattening a level with the newly prepended regime as the
leading axis keeps suffixes in lexicographic order. Once a level would exceed
``ENUMERATION_BLOCK_SIZE`` entries, the remaining (earliest) regimes are
looped over as fixed prefixes; each prefix finishes the recursion on the
shared suffix array and yields one block sum. Block sums are merged in
prefix order, so the result does not depend on the number of worker threads.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .chain import ChainPath, TransitionSchedule, count_paths, simulate_regimes
from .dynamics import RegimeParams
from .errors import DivergentExpectation, PathBudgetExceeded, TimeOutOfRange, ValidationError
from .random import make_stream
from .recursion import CoeffSchedule, step_arrays
from .tolerances import DEFAULT_MAX_PATHS, ENUMERATION_BLOCK_SIZE

Mode = Literal["exact_enumeration", "chain_monte_carlo"]


@dataclass(frozen=True)
class PriceResult:
    valuation_time: int
    maturity: int
    price: float
    num_paths_used: int
    mode: Mode
    standard_error: float = 0.0

    @property
    def yield_(self) -> float:
        """Continuously compounded yield per period; NaN when ``k == T``."""
        tau = self.maturity - self.valuation_time
        return -math.log(self.price) / tau if tau > 0 else math.nan


@dataclass(frozen=True)
class YieldCurve:
    valuation_time: int
    points: tuple[tuple[int, float, float], ...]

    @property
    def maturities(self) -> np.ndarray:
        return np.array([p[0] for p in self.points], dtype=np.int64)

    @property
    def prices(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @property
    def yields(self) -> np.ndarray:
        return np.array([p[2] for p in self.points])


def conditional_price(schedule: CoeffSchedule, s_k):
    """``exp(c1 + c2*s + c3*s**2)`` with the triple at the schedule's start."""
    c1, c2, c3 = schedule.initial
    return np.exp(c1 + c2 * s_k + c3 * s_k * s_k)


def _check_inputs(schedule: TransitionSchedule, params: RegimeParams, k: int, T: int, i_k: int) -> None:
    if params.num_regimes != schedule.num_regimes:
        raise ValidationError(
            f"parameters cover {params.num_regimes} regimes but the chain has {schedule.num_regimes}"
        )
    if not 0 <= i_k < schedule.num_regimes:
        raise ValidationError(f"regime {i_k} outside 0..{schedule.num_regimes - 1}")
    if k < 0 or T < k:
        raise TimeOutOfRange(f"need 0 <= k <= T, got k={k}, T={T}")
    if not schedule.covers(T):
        raise TimeOutOfRange(f"transition schedule does not reach maturity {T}")


def _digits(index: int, base: int, width: int) -> tuple[int, ...]:
    out = []
    for _ in range(width):
        index, r = divmod(index, base)
        out.append(r)
    return tuple(reversed(out))


class _Step:
    """Advance arrays of triples one step back through given regimes."""

    def __init__(self, params: RegimeParams) -> None:
        self.p = params

    def __call__(self, regimes, c1, c2, c3, time, suffix_of):
        p = self.p
        n1, n2, n3, ok = step_arrays(
            p.kappa[regimes], p.mu[regimes], p.sigma[regimes], p.a0[regimes], p.a1[regimes], p.a2[regimes], c1, c2, c3
        )
        if not np.all(ok):
            bad = int(np.flatnonzero(~np.broadcast_to(ok, np.broadcast(n1, ok).shape).ravel())[0])
            suffix = suffix_of(bad)
            raise DivergentExpectation(
                f"backward step at time {time} diverges on regime path {suffix} (times {time}..{time + len(suffix) - 1})",
                time=time,
                regime=suffix[0],
                path=suffix,
            )
        return n1, n2, n3


def bond_price(
    schedule: TransitionSchedule,
    params: RegimeParams,
    k: int,
    T: int,
    s_k: float,
    i_k: int,
    max_paths: int = DEFAULT_MAX_PATHS,
    *,
    threads: int = 1,
    block_size: int = ENUMERATION_BLOCK_SIZE,
    fallback_mc: bool = False,
    num_paths: int | None = None,
    rng_seed=None,
) -> PriceResult:
    """Price ``P(k, T)`` by exhaustive enumeration of regime paths.

    Parameters
    ----------
    schedule, params
        Chain and regime parameters.
    k, T
        Valuation time and maturity, ``0 <= k <= T``.
    s_k, i_k
        Asset level and (0-based) regime at time ``k``.
    max_paths
        Enumeration budget.
    threads
        Worker threads over path blocks. The result is bit-identical for any
        thread count.
    fallback_mc
        When the budget is exceeded, fall back to :func:`bond_price_chain_mc`
        with ``num_paths`` and ``rng_seed`` instead of raising.

    Raises
    ------
    PathBudgetExceeded
        If ``N ** (T - k - 1) > max_paths`` and ``fallback_mc`` is off.
    DivergentExpectation
        If a backward step diverges; ``exc.path`` holds the offending regime
        suffix starting at ``exc.time``.
    """
    _check_inputs(schedule, params, k, T, i_k)
    if k == T:
        return PriceResult(k, T, 1.0, 1, "exact_enumeration")
    n = schedule.num_regimes
    free = T - k - 1
    total = count_paths(n, k, T)
    if total > max_paths:
        if fallback_mc:
            from .tolerances import DEFAULT_MC_SIMS

            return bond_price_chain_mc(
                schedule, params, k, T, s_k, i_k, num_paths or DEFAULT_MC_SIMS, rng_seed
            )
        raise PathBudgetExceeded(total, max_paths)
    if block_size < n:
        raise ValidationError("block_size must be at least the number of regimes")

    step = _Step(params)
    # Suffix levels: times T-1 down to k+prefix+1, vectorized and shared.
    depth = 0
    while depth < free and n ** (depth + 1) <= block_size:
        depth += 1
    prefix_len = free - depth

    c1 = c2 = c3 = np.zeros(1)
    weight = np.ones(1)
    first = None
    width = 1
    for level in range(depth):
        t = T - 1 - level
        regimes = np.repeat(np.arange(n), width)
        if first is not None:
            weight = (schedule.matrix(t)[regimes, np.tile(first, n)] * np.tile(weight, n))
        else:
            weight = np.tile(weight, n)
        c1, c2, c3 = step(
            regimes,
            np.tile(c1, n),
            np.tile(c2, n),
            np.tile(c3, n),
            t,
            lambda idx, lv=level: _digits(idx, n, lv + 1),
        )
        first = regimes
        width *= n

    def block(prefix: tuple[int, ...]) -> float:
        b1, b2, b3, w, nxt = c1, c2, c3, weight, first
        # Regimes at times k+1 .. k+prefix_len, then the known regime at k.
        chain = (i_k,) + prefix
        for offset in range(len(chain) - 1, -1, -1):
            t = k + offset
            x = chain[offset]
            if nxt is not None:
                w = schedule.matrix(t)[x, nxt] * w
            b1, b2, b3 = step(
                np.intp(x), b1, b2, b3, t,
                lambda idx, off=offset: chain[off:] + _digits(idx, n, depth),
            )
            nxt = x
        return float(np.sum(w * np.exp(b1 + b2 * s_k + b3 * s_k * s_k)))

    prefixes = list(itertools.product(range(n), repeat=prefix_len))
    if threads > 1 and len(prefixes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sums = list(pool.map(block, prefixes))
    else:
        sums = [block(p) for p in prefixes]
    price = float(np.sum(np.array(sums))) if len(sums) > 1 else sums[0]
    return PriceResult(k, T, price, total, "exact_enumeration")


def chain_mc_conditional_prices(
    schedule: TransitionSchedule,
    params: RegimeParams,
    k: int,
    T: int,
    s_k: float,
    i_k: int,
    num_paths: int,
    gen: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate regime paths and return ``(paths, conditional_prices)``."""
    paths = simulate_regimes(schedule, k, np.full(num_paths, i_k), T, gen)
    c1 = c2 = c3 = np.zeros(num_paths)
    step = _Step(params)
    for col in range(T - k - 1, -1, -1):
        regimes = paths[:, col]
        c1, c2, c3 = step(regimes, c1, c2, c3, k + col, lambda idx, col=col: tuple(paths[idx, col:].tolist()))
    return paths, np.exp(c1 + c2 * s_k + c3 * s_k * s_k)


def bond_price_chain_mc(
    schedule: TransitionSchedule,
    params: RegimeParams,
    k: int,
    T: int,
    s_k: float,
    i_k: int,
    num_paths: int,
    rng_seed=None,
) -> PriceResult:
    """Estimate ``P(k, T)`` by averaging conditional prices over simulated regime paths.

    Shocks are integrated out exactly by the closed form; only the chain is
    sampled. The returned ``standard_error`` is the sample standard deviation
    of the conditional prices over ``sqrt(num_paths)``.
    """
    _check_inputs(schedule, params, k, T, i_k)
    if num_paths < 2:
        raise ValidationError("num_paths must be at least 2")
    if k == T:
        return PriceResult(k, T, 1.0, num_paths, "chain_monte_carlo")
    _, prices = chain_mc_conditional_prices(schedule, params, k, T, s_k, i_k, num_paths, make_stream(rng_seed))
    if np.all(prices == prices[0]):
        return PriceResult(k, T, float(prices[0]), num_paths, "chain_monte_carlo", 0.0)
    se = float(np.std(prices, ddof=1) / math.sqrt(num_paths))
    return PriceResult(k, T, float(np.mean(prices)), num_paths, "chain_monte_carlo", se)


def yield_curve(
    schedule: TransitionSchedule,
    params: RegimeParams,
    k: int,
    s_k: float,
    i_k: int,
    maturities: Sequence[int],
    max_paths: int = DEFAULT_MAX_PATHS,
    *,
    mode: Literal["exact", "mc"] = "exact",
    num_paths: int | None = None,
    rng_seed=None,
    threads: int = 1,
) -> YieldCurve:
    """Prices and yields ``-log(P) / (T - k)`` for strictly increasing maturities ``T > k``."""
    mats = [int(t) for t in maturities]
    if not mats:
        raise ValidationError("at least one maturity is required")
    if any(t <= k for t in mats):
        raise ValidationError(f"every maturity must exceed the valuation time {k}")
    if any(b <= a for a, b in zip(mats, mats[1:])):
        raise ValidationError("maturities must be strictly increasing")
    points = []
    for t in mats:
        if mode == "exact":
            res = bond_price(schedule, params, k, t, s_k, i_k, max_paths, threads=threads)
        else:
            from .tolerances import DEFAULT_MC_SIMS

            res = bond_price_chain_mc(schedule, params, k, t, s_k, i_k, num_paths or DEFAULT_MC_SIMS, rng_seed)
        points.append((t, res.price, -math.log(res.price) / (t - k)))
    return YieldCurve(k, tuple(points))


def path_prices(params: RegimeParams, paths: Sequence[ChainPath], s_k: float) -> np.ndarray:
    """Conditional price along each of ``paths`` (all sharing one start time)."""
    from .recursion import coefficient_schedule

    return np.array([float(conditional_price(coefficient_schedule(params, p), s_k)) for p in paths])
