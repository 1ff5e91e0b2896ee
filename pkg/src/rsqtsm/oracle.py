"""
Brute-force verifiers for the closed-form prices.

None of these routines use the coefficient recursion to produce their
value: Monte Carlo averages the discount factor ``exp(-sum r_t)`` over
simulated shocks (and regimes), and nested Gauss-Hermite quadrature
integrates the same discount factor one shock at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy import integrate
from scipy.linalg import eigvalsh_tridiagonal

from .chain import ChainPath, TransitionSchedule, simulate_regimes
from .dynamics import RegimeParams
from .errors import QuadratureDiverged, ValidationError
from .pricing import bond_price, conditional_price
from .random import make_stream, standard_normals
from .recursion import coefficient_schedule, gaussian_quad_expectation
from .tolerances import DEFAULT_MAX_PATHS, EXACT_TOL, MC_HEAVY_TAIL_RATIO, MC_NUM_SE, QUADRATURE_TOL

Target = Literal["conditional_price", "unconditional_price", "gaussian_moment"]

# Rows of shocks simulated per vectorized chunk.
_CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleReport:
    target: Target
    closed_form: float
    oracle_value: float
    standard_error: float
    pass_: bool
    tolerance_used: float
    heavy_tail: bool = False
    label: str = ""

    @classmethod
    def judge(cls, target, closed_form, oracle_value, standard_error, tolerance, **extra) -> "OracleReport":
        ok = abs(closed_form - oracle_value) <= max(tolerance, MC_NUM_SE * standard_error)
        return cls(target, float(closed_form), float(oracle_value), float(standard_error), bool(ok), float(tolerance), **extra)

    @property
    def passed(self) -> bool:
        return self.pass_

    @property
    def num_se(self) -> float:
        """Discrepancy in standard errors (inf when SE is zero and values differ)."""
        diff = abs(self.closed_form - self.oracle_value)
        if self.standard_error > 0:
            return diff / self.standard_error
        return 0.0 if diff == 0 else math.inf


@lru_cache(maxsize=None)
def hermite_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes and weights for the standard normal law.

    Golub-Welsch: the nodes are the eigenvalues of the symmetric Jacobi
    matrix of the probabilists' Hermite polynomials (zero diagonal,
    off-diagonal ``sqrt(j)``). The weights are the matching Christoffel
    numbers ``1 / sum_j p_j(x)**2`` over the orthonormal polynomials, which,
    unlike squared eigenvector components, keep full relative accuracy in
    the far tails. Weights sum to one, so ``weights @ h(nodes)``
    approximates ``E[h(eps)]``.
    """
    if n < 1:
        raise ValidationError("need at least one node")
    if n == 1:
        return np.zeros(1), np.ones(1)
    off = np.sqrt(np.arange(1, n, dtype=np.float64))
    nodes = eigvalsh_tridiagonal(np.zeros(n), off)
    nodes = 0.5 * (nodes - nodes[::-1])
    prev = np.zeros(n)
    cur = np.ones(n)
    norm = np.ones(n)
    for j in range(1, n):
        prev, cur = cur, (nodes * cur - math.sqrt(j - 1) * prev) / math.sqrt(j)
        norm += cur * cur
    weights = 1.0 / norm
    weights /= weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gaussian_moment_by_integration(f: float, g: float) -> float:
    """``E[exp(f*eps + g*eps**2)]`` by adaptive quadrature over the real line.

    The integrand is split at its peak, and each half is integrated over a
    window many widths long; the Gaussian tail beyond it is below 1e-300.
    """
    if g >= 0.5:
        raise QuadratureDiverged(f"integrand exp({f}x + ({g} - 1/2)x^2) is not integrable")
    a = 0.5 - g
    peak = f / (2.0 * a)
    width = 1.0 / math.sqrt(2.0 * a)
    top = f * peak - a * peak * peak

    def h(x):
        return math.exp(f * x - a * x * x - top)

    span = 40.0 * width
    left, _ = integrate.quad(h, peak - span, peak, epsabs=0.0, epsrel=1e-13, limit=200)
    right, _ = integrate.quad(h, peak, peak + span, epsabs=0.0, epsrel=1e-13, limit=200)
    return (left + right) * math.exp(top) / math.sqrt(2.0 * math.pi)


def gaussian_moment_report(f: float, g: float, rel_tol: float = 1e-10) -> OracleReport:
    closed = gaussian_quad_expectation(f, g)
    numeric = gaussian_moment_by_integration(f, g)
    return OracleReport.judge("gaussian_moment", closed, numeric, 0.0, rel_tol * abs(closed), label=f"f={f:g}, g={g:g}")


def _discounts(params: RegimeParams, regimes: np.ndarray, s_k: float, eps: np.ndarray) -> np.ndarray:
    """``exp(-sum_t r_t)`` for shock rows ``eps`` (shape ``(m, L-1)``) along regime rows."""
    m, length = regimes.shape
    s = np.full(m, float(s_k))
    total = np.zeros(m)
    for col in range(length):
        x = regimes[:, col]
        total += params.a0[x] + params.a1[x] * s + params.a2[x] * s * s
        if col < length - 1:
            s = params.kappa[x] + params.mu[x] * s + params.sigma[x] * eps[:, col]
    return np.exp(-total)


def _mc_estimate(sample_rows, num_sims: int, antithetic: bool, gen) -> tuple[float, float]:
    """Mean and standard error of per-row (or per-pair) samples.

    Chunks are merged with the pairwise mean/M2 update, which avoids the
    cancellation of a raw sum-of-squares when the variance is tiny.
    """
    count = 0
    mean = 0.0
    m2 = 0.0
    first = None
    constant = True
    while count < num_sims:
        rows = min(_CHUNK, num_sims - count)
        vals = sample_rows(rows, gen, antithetic)
        if first is None:
            first = float(vals[0])
        constant = constant and bool(np.all(vals == first))
        b_mean = float(np.mean(vals))
        b_m2 = float(np.sum((vals - b_mean) ** 2))
        total = count + rows
        delta = b_mean - mean
        mean += delta * rows / total
        m2 += b_m2 + delta * delta * count * rows / total
        count = total
    if constant:
        return first, 0.0
    return mean, math.sqrt(m2 / (num_sims - 1) / num_sims)


def mc_conditional_price(
    params: RegimeParams,
    path: ChainPath,
    s_k: float,
    num_sims: int,
    rng_seed=None,
    *,
    antithetic: bool = True,
) -> OracleReport:
    """Sample-average of ``exp(-sum r_t)`` with the regime path frozen.

    With ``antithetic`` on, ``num_sims`` counts shock pairs ``(eps, -eps)``
    and the standard error is computed from the pair means.
    """
    if num_sims < 1000:
        raise ValidationError("num_sims must be at least 1000")
    states = np.asarray(path.states, dtype=np.int64)
    n_shocks = len(states) - 1

    def rows(m, gen, anti):
        eps = standard_normals(gen, (m, n_shocks))
        reg = np.broadcast_to(states, (m, len(states)))
        d = _discounts(params, reg, s_k, eps)
        if anti:
            d = 0.5 * (d + _discounts(params, reg, s_k, -eps))
        return d

    mean, se = _mc_estimate(rows, num_sims, antithetic, make_stream(rng_seed))
    closed = float(conditional_price(coefficient_schedule(params, path), s_k))
    return OracleReport.judge(
        "conditional_price",
        closed,
        mean,
        se,
        EXACT_TOL,
        heavy_tail=bool(mean > 0 and se / mean > MC_HEAVY_TAIL_RATIO),
        label=f"path={path.states}",
    )


def mc_unconditional_price(
    params: RegimeParams,
    schedule: TransitionSchedule,
    k: int,
    T: int,
    s_k: float,
    i_k: int,
    num_sims: int,
    rng_seed=None,
    *,
    antithetic: bool = True,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> OracleReport:
    """Joint simulation of regimes and shocks, compared with exact enumeration.

    Each row draws a regime path and a shock vector; with ``antithetic`` on,
    the mirrored shocks reuse the same regime path.
    """
    if num_sims < 1000:
        raise ValidationError("num_sims must be at least 1000")
    if T <= k:
        raise ValidationError("need k < T")

    def rows(m, gen, anti):
        reg = simulate_regimes(schedule, k, np.full(m, i_k), T, gen)
        eps = standard_normals(gen, (m, T - k - 1))
        d = _discounts(params, reg, s_k, eps)
        if anti:
            d = 0.5 * (d + _discounts(params, reg, s_k, -eps))
        return d

    mean, se = _mc_estimate(rows, num_sims, antithetic, make_stream(rng_seed))
    closed = bond_price(schedule, params, k, T, s_k, i_k, max_paths).price
    return OracleReport.judge(
        "unconditional_price",
        closed,
        mean,
        se,
        EXACT_TOL,
        heavy_tail=bool(mean > 0 and se / mean > MC_HEAVY_TAIL_RATIO),
        label=f"k={k}, T={T}, regime={i_k}",
    )


def quadrature_conditional_price(
    params: RegimeParams,
    path: ChainPath,
    s_k: float,
    nodes_per_level: int = 64,
    *,
    rel_tol: float = QUADRATURE_TOL,
) -> OracleReport:
    """Nested Gauss-Hermite evaluation of ``E[exp(-sum r_t)]`` along a frozen path.

    Every shock ``eps_{k+1}, ..., eps_{T-1}`` gets its own rule, so the cost
    is ``nodes_per_level ** (len(path) - 1)`` integrand evaluations.

    Raises
    ------
    QuadratureDiverged
        If the discount factor, viewed as a function of one shock, grows like
        ``exp(g * eps**2)`` with ``g >= 1/2`` at some level. The growth rate is
        tracked through the leading quadratic coefficient ``q`` of
        ``log E[exp(-sum_{u>=t} r_u) | S_t]``, which obeys
        ``q_t = -a2 + mu**2 q_{t+1} / (1 - 2 sigma**2 q_{t+1})``.
    """
    if len(path) > 4:
        raise ValidationError("nested quadrature is limited to paths of length <= 4")
    if nodes_per_level < 32:
        raise ValidationError("nodes_per_level must be at least 32")
    states = path.states
    q = -params.a2[states[-1]]
    for offset in range(len(states) - 2, -1, -1):
        _, mu, sigma, *_ = params.row(states[offset])
        g = q * sigma * sigma
        if g >= 0.5:
            raise QuadratureDiverged(
                f"level {path.start_time + offset + 1}: integrand grows like exp({g:.6g} eps^2)",
                time=path.start_time + offset,
                regime=states[offset],
            )
        q = -params.a2[states[offset]] + mu * mu * q / (1.0 - 2.0 * g)

    nodes, weights = hermite_rule(nodes_per_level)
    value = _nested(params, states, np.array([float(s_k)]), nodes, weights)[0]
    closed = float(conditional_price(coefficient_schedule(params, path), s_k))
    return OracleReport.judge(
        "conditional_price",
        closed,
        value,
        0.0,
        rel_tol * abs(closed),
        label=f"path={states}, nodes={nodes_per_level}",
    )


def _nested(params: RegimeParams, states, s: np.ndarray, nodes, weights) -> np.ndarray:
    """``E[exp(-sum_{t>=0} r_t) | S_0 = s]`` along ``states`` for each entry of ``s``."""
    x = states[0]
    disc = np.exp(-(params.a0[x] + params.a1[x] * s + params.a2[x] * s * s))
    if len(states) == 1:
        return disc
    nxt = params.kappa[x] + params.mu[x] * s[:, None] + params.sigma[x] * nodes[None, :]
    inner = _nested(params, states[1:], nxt.ravel(), nodes, weights).reshape(nxt.shape)
    return disc * (inner @ weights)
