"""
Exponential-quadratic coefficient recursion for conditional bond prices.

Given a frozen regime path, the conditional bond price has the form

    P(k, T) = exp(c1_k + c2_k * S_k + c3_k * S_k**2)

with (c1, c2, c3) = 0 at maturity. One backward step from time n to n - 1,
with all model parameters taken in the regime occupied at n - 1 and
D = 1 - 2 * c3_n * sigma**2 > 0, is

    c3_{n-1} = -a2 + c3_n * mu**2 / D
    c2_{n-1} = -a1 + mu * (c2_n + 2 * c3_n * kappa) / D
    c1_{n-1} = -a0 + c1_n + c2_n * kappa + c3_n * kappa**2
               - log(D) / 2 + sigma**2 * (c2_n + 2 * c3_n * kappa)**2 / (2 * D)

It follows from substituting S_n = kappa + mu * S_{n-1} + sigma * eps into
the time-n exponent and integrating with the Gaussian moment

    E[exp(f * eps + g * eps**2)] = (1 - 2g)**(-1/2) * exp(f**2 / (2 * (1 - 2g)))

using f = sigma * (c2_n + 2 * c3_n * (kappa + mu * S_{n-1})) and g = c3_n * sigma**2.
At the last step it reduces to (c1, c2, c3)_{T-1} = (-a0, -a1, -a2), i.e.
P(T - 1, T) = exp(-r_{T-1}). See ``docs/derivation.md`` for the algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .chain import ChainPath
from .dynamics import RegimeParams
from .errors import DivergentExpectation, NotAffine


class CoeffTriple(NamedTuple):
    c1: float
    c2: float
    c3: float

    def log_price(self, s):
        return self.c1 + self.c2 * s + self.c3 * s * s

    def admissible(self, sigma: float) -> bool:
        """True if a backward step through a regime with this ``sigma`` is finite."""
        return 1.0 - 2.0 * self.c3 * sigma * sigma > 0.0


ZERO = CoeffTriple(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class CoeffSchedule:
    """Coefficient triples for times ``start_time, ..., T`` along ``path``."""

    start_time: int
    triples: tuple[CoeffTriple, ...]
    path: ChainPath

    @property
    def maturity(self) -> int:
        return self.start_time + len(self.triples) - 1

    def at(self, time: int) -> CoeffTriple:
        return self.triples[time - self.start_time]

    @property
    def initial(self) -> CoeffTriple:
        return self.triples[0]

    def as_array(self) -> np.ndarray:
        """Shape ``(len, 3)`` array of the triples."""
        return np.array(self.triples, dtype=np.float64)


def gaussian_quad_expectation(f: float, g: float) -> float:
    """``E[exp(f*eps + g*eps**2)]`` for ``eps ~ N(0, 1)``.

    Raises
    ------
    DivergentExpectation
        If ``g >= 1/2``; the integral is then infinite.
    """
    if not g < 0.5:
        raise DivergentExpectation(f"E[exp(f*eps + g*eps^2)] diverges for g = {g!r} >= 1/2")
    d = 1.0 - 2.0 * g
    return math.exp(f * f / (2.0 * d) - 0.5 * math.log1p(-2.0 * g))


def step_arrays(kappa, mu, sigma, a0, a1, a2, c1, c2, c3):
    """Vectorized backward step; all arguments broadcast together.

    Returns ``(c1, c2, c3, ok)`` where ``ok`` is False wherever the step
    diverges. Entries with ``ok`` False hold garbage.
    """
    var = sigma * sigma
    two_g = 2.0 * c3 * var
    d = 1.0 - two_g
    ok = d > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        lin = c2 + 2.0 * c3 * kappa
        n3 = -a2 + c3 * mu * mu / d
        n2 = -a1 + mu * lin / d
        n1 = -a0 + c1 + c2 * kappa + c3 * kappa * kappa - 0.5 * np.log1p(-two_g) + var * lin * lin / (2.0 * d)
    return n1, n2, n3, ok


def backward_step(params: RegimeParams, regime_at_nm1: int, next: CoeffTriple, *, time: int | None = None) -> CoeffTriple:
    """Map the triple at time ``n`` to the triple at ``n - 1``.

    ``regime_at_nm1`` is the regime occupied at ``n - 1``; ``time`` is only
    used to label a :class:`DivergentExpectation`.
    """
    kappa, mu, sigma, a0, a1, a2 = params.row(regime_at_nm1)
    c1, c2, c3 = next
    if not 1.0 - 2.0 * c3 * sigma * sigma > 0.0:
        where = f" at time {time}" if time is not None else ""
        raise DivergentExpectation(
            f"backward step{where} in regime {regime_at_nm1} diverges: "
            f"1 - 2*c3*sigma^2 = {1.0 - 2.0 * c3 * sigma * sigma!r} <= 0",
            time=time,
            regime=regime_at_nm1,
        )
    n1, n2, n3, _ = step_arrays(kappa, mu, sigma, a0, a1, a2, c1, c2, c3)
    return CoeffTriple(float(n1), float(n2), float(n3))


def coefficient_schedule(params: RegimeParams, path: ChainPath) -> CoeffSchedule:
    """Run the backward recursion from maturity down to ``path.start_time``."""
    triples = [ZERO]
    current = ZERO
    for offset in range(len(path) - 1, -1, -1):
        time = path.start_time + offset
        try:
            current = backward_step(params, path.states[offset], current, time=time)
        except DivergentExpectation as exc:
            exc.path = path.states[offset:]
            raise
        triples.append(current)
    triples.reverse()
    return CoeffSchedule(path.start_time, tuple(triples), path)


def affine_schedule(params: RegimeParams, path: ChainPath) -> CoeffSchedule:
    """Backward recursion specialised to a2 = 0, where c3 stays at zero.

        c1_{n-1} = -a0 + c1_n + c2_n * kappa + sigma**2 * c2_n**2 / 2
        c2_{n-1} = -a1 + mu * c2_n

    Raises
    ------
    NotAffine
        If any regime visited by ``path`` has a nonzero ``a2``.
    """
    for regime in set(path.states):
        if params.a2[regime] != 0.0:
            raise NotAffine(f"regime {regime} has a2 = {params.a2[regime]!r}; the affine recursion needs a2 = 0")
    c1 = c2 = 0.0
    triples = [ZERO]
    for regime in reversed(path.states):
        kappa, mu, sigma, a0, a1, _ = params.row(regime)
        c1, c2 = -a0 + c1 + c2 * kappa + sigma * sigma * c2 * c2 / 2.0, -a1 + mu * c2
        triples.append(CoeffTriple(c1, c2, 0.0))
    triples.reverse()
    return CoeffSchedule(path.start_time, tuple(triples), path)
