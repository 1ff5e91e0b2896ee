"""
Regime-dependent asset dynamics and the quadratic short rate.

Asset:       S_{k+1} = kappa_i + mu_i * S_k + sigma_i * eps_{k+1},  eps ~ N(0, 1)
Short rate:  r_k     = a0_i + a1_i * S_k + a2_i * S_k**2

where ``i`` is the regime occupied at time ``k``. Parameters depend on time
only through the regime, so one set is stored per regime.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .chain import ChainPath
from .errors import ValidationError
from .random import make_stream, standard_normals


@dataclass(frozen=True, eq=False)
class RegimeParams:
    """
    Per-regime model coefficients, each a length-N float array.

    Attributes
    ----------
    kappa, mu, sigma : ndarray
        Asset drift constant, autoregressive coefficient and shock scale.
        ``sigma`` must be strictly positive.
    a0, a1, a2 : ndarray
        Constant, linear and quadratic short-rate coefficients.
    """

    kappa: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray

    def __post_init__(self) -> None:
        arrays = {}
        for f in fields(self):
            arr = np.atleast_1d(np.array(getattr(self, f.name), dtype=np.float64))
            if arr.ndim != 1:
                raise ValidationError(f"{f.name} must be one-dimensional")
            arrays[f.name] = arr
        sizes = {a.size for a in arrays.values()}
        if len(sizes) != 1 or 0 in sizes:
            raise ValidationError("all regime parameter vectors must share one nonzero length")
        for name, arr in arrays.items():
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} has non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        bad = np.flatnonzero(arrays["sigma"] <= 0)
        if bad.size:
            raise ValidationError(f"sigma must be > 0 in every regime (regime {int(bad[0])} has {arrays['sigma'][bad[0]]!r})")

    @classmethod
    def single(cls, kappa, mu, sigma, a0, a1, a2) -> "RegimeParams":
        return cls([kappa], [mu], [sigma], [a0], [a1], [a2])

    @classmethod
    def from_rows(cls, rows) -> "RegimeParams":
        """Build from an iterable of ``(kappa, mu, sigma, a0, a1, a2)`` rows."""
        cols = np.asarray(rows, dtype=np.float64).T
        return cls(*cols)

    @property
    def num_regimes(self) -> int:
        return self.kappa.size

    def row(self, i: int) -> tuple[float, float, float, float, float, float]:
        return (
            float(self.kappa[i]),
            float(self.mu[i]),
            float(self.sigma[i]),
            float(self.a0[i]),
            float(self.a1[i]),
            float(self.a2[i]),
        )

    def replace(self, **changes) -> "RegimeParams":
        current = {f.name: getattr(self, f.name) for f in fields(self)}
        current.update(changes)
        return RegimeParams(**current)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RegimeParams):
            return NotImplemented
        return all(np.array_equal(getattr(self, f.name), getattr(other, f.name)) for f in fields(self))


@dataclass(frozen=True)
class MarketState:
    """Conditioning information at time ``time``: asset level and current regime."""

    time: int
    asset: float
    regime: int


def asset_step(params: RegimeParams, regime_at_k: int, s_k, eps):
    i = regime_at_k
    return params.kappa[i] + params.mu[i] * s_k + params.sigma[i] * eps


def short_rate(params: RegimeParams, regime_at_k: int, s_k):
    i = regime_at_k
    return params.a0[i] + params.a1[i] * s_k + params.a2[i] * s_k * s_k


def simulate_asset_path(
    params: RegimeParams,
    path: ChainPath,
    s_start: float,
    rng_seed=None,
    *,
    shocks=None,
) -> list[tuple[int, float, float]]:
    """Simulate ``(k, S_k, r_k)`` for every time covered by ``path``.

    The asset starts at ``s_start`` at ``path.start_time`` and is stepped
    with the regime occupied at each time. One standard normal is drawn per
    step taken (``len(path) - 1`` in total). ``shocks`` overrides the draws
    and is meant for tests.
    """
    n_steps = len(path) - 1
    if shocks is None:
        eps = standard_normals(make_stream(rng_seed), n_steps)
    else:
        eps = np.asarray(shocks, dtype=np.float64)
        if eps.shape != (n_steps,):
            raise ValidationError(f"expected {n_steps} shocks, got shape {eps.shape}")
    out = []
    s = float(s_start)
    for offset, regime in enumerate(path.states):
        out.append((path.start_time + offset, s, float(short_rate(params, regime, s))))
        if offset < n_steps:
            s = float(asset_step(params, regime, s, eps[offset]))
    return out
