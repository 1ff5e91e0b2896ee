"""
TOML model configuration.

Grammar (all regime indices 1-based)::

    num_regimes = 2          # optional, inferred from [[regime]] when absent
    horizon = 6              # maturity T, >= 1

    [[regime]]               # one table per regime, in regime order
    kappa = 0.1
    mu = 0.95
    sigma = 0.2              # > 0
    a0 = 0.02
    a1 = 0.01
    a2 = 0.001

    [transition]             # exactly one of the two keys
    matrix = [[0.9, 0.1], [0.2, 0.8]]          # time-homogeneous
    # matrices = [ [[...]], [[...]], ... ]     # Q_0 .. Q_{L-1}, L >= horizon - 1

    [initial]                # optional; defaults k = 0, s = 0.0, regime = 1
    k = 0
    s = 0.5
    regime = 1

    [engine]                 # optional; defaults shown
    max_paths = 10000000
    mc_sims = 100000
    seed = 42
    quad_nodes = 64
    quadrature_tol = 1e-8
    exact_tol = 1e-12
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .chain import TransitionSchedule, validate_schedule
from .dynamics import RegimeParams
from .errors import NegativeEntry, ParseError, RowSumViolation, ValidationError
from .tolerances import DEFAULT_MAX_PATHS, DEFAULT_MC_SIMS, DEFAULT_QUAD_NODES, DEFAULT_SEED, EXACT_TOL, QUADRATURE_TOL

PARAM_NAMES = ("kappa", "mu", "sigma", "a0", "a1", "a2")
_TOP_KEYS = {"num_regimes", "horizon", "regime", "transition", "initial", "engine"}


@dataclass(frozen=True)
class EngineConfig:
    max_paths: int = DEFAULT_MAX_PATHS
    mc_sims: int = DEFAULT_MC_SIMS
    seed: int = DEFAULT_SEED
    quad_nodes: int = DEFAULT_QUAD_NODES
    quadrature_tol: float = QUADRATURE_TOL
    exact_tol: float = EXACT_TOL


@dataclass(frozen=True, eq=False)
class ModelConfig:
    horizon: int
    params: RegimeParams
    schedule: TransitionSchedule
    k0: int = 0
    s0: float = 0.0
    i0: int = 0  # 0-based
    engine: EngineConfig = field(default_factory=EngineConfig)

    @property
    def num_regimes(self) -> int:
        return self.params.num_regimes

    def to_dict(self) -> dict:
        """Normalized form with every default spelled out."""
        out: dict = {"num_regimes": self.num_regimes, "horizon": self.horizon}
        out["regime"] = [dict(zip(PARAM_NAMES, self.params.row(i))) for i in range(self.num_regimes)]
        if self.schedule.homogeneous:
            out["transition"] = {"matrix": self.schedule.matrices[0].tolist()}
        else:
            out["transition"] = {"matrices": self.schedule.matrices.tolist()}
        out["initial"] = {"k": self.k0, "s": float(self.s0), "regime": self.i0 + 1}
        e = self.engine
        out["engine"] = {
            "max_paths": e.max_paths,
            "mc_sims": e.mc_sims,
            "seed": e.seed,
            "quad_nodes": e.quad_nodes,
            "quadrature_tol": e.quadrature_tol,
            "exact_tol": e.exact_tol,
        }
        return out

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def load_config(path) -> ModelConfig:
    """Read and validate a configuration file.

    Raises
    ------
    ParseError
        Malformed TOML (with line number) or a missing / mistyped field.
    ValidationError
        Well-formed input that violates a model invariant.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text)


def parse_config(text: str) -> ModelConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ParseError(str(exc), line=int(m.group(1)) if m else None) from exc
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ModelConfig:
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}", field=sorted(unknown)[0])

    horizon = _int(raw, "horizon", required=True)
    if horizon < 1:
        raise ValidationError(f"horizon must be >= 1, got {horizon}")

    regimes = raw.get("regime")
    if not isinstance(regimes, list) or not regimes:
        raise ParseError("expected one or more [[regime]] tables", field="regime")
    rows = []
    for idx, table in enumerate(regimes, start=1):
        if not isinstance(table, dict):
            raise ParseError("expected a table", field=f"regime[{idx}]")
        extra = set(table) - set(PARAM_NAMES)
        if extra:
            raise ParseError(f"unknown keys {sorted(extra)}", field=f"regime[{idx}]")
        rows.append([_float(table, name, prefix=f"regime[{idx}].") for name in PARAM_NAMES])
    try:
        params = RegimeParams.from_rows(rows)
    except ValidationError as exc:
        raise ValidationError(f"regime parameters: {exc}") from exc

    n = raw.get("num_regimes", len(rows))
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParseError("expected an integer", field="num_regimes")
    if n != len(rows):
        raise ValidationError(f"num_regimes = {n} but {len(rows)} [[regime]] tables given")

    schedule = _schedule(raw.get("transition"), n, horizon)

    initial = raw.get("initial", {})
    if not isinstance(initial, dict):
        raise ParseError("expected a table", field="initial")
    k0 = _int(initial, "k", default=0, prefix="initial.")
    s0 = _float(initial, "s", default=0.0, prefix="initial.")
    regime = _int(initial, "regime", default=1, prefix="initial.")
    if not 1 <= regime <= n:
        raise ValidationError(f"initial.regime = {regime} outside 1..{n}")
    if not 0 <= k0 <= horizon:
        raise ValidationError(f"initial.k = {k0} outside 0..{horizon}")

    eng = raw.get("engine", {})
    if not isinstance(eng, dict):
        raise ParseError("expected a table", field="engine")
    defaults = EngineConfig()
    extra = set(eng) - set(defaults.__dataclass_fields__)
    if extra:
        raise ParseError(f"unknown keys {sorted(extra)}", field="engine")
    engine = EngineConfig(
        max_paths=_int(eng, "max_paths", default=defaults.max_paths, prefix="engine."),
        mc_sims=_int(eng, "mc_sims", default=defaults.mc_sims, prefix="engine."),
        seed=_int(eng, "seed", default=defaults.seed, prefix="engine."),
        quad_nodes=_int(eng, "quad_nodes", default=defaults.quad_nodes, prefix="engine."),
        quadrature_tol=_float(eng, "quadrature_tol", default=defaults.quadrature_tol, prefix="engine."),
        exact_tol=_float(eng, "exact_tol", default=defaults.exact_tol, prefix="engine."),
    )
    if engine.max_paths < 1 or engine.mc_sims < 2 or engine.seed < 0:
        raise ValidationError("engine.max_paths >= 1, engine.mc_sims >= 2 and engine.seed >= 0 are required")
    return ModelConfig(horizon, params, schedule, k0, s0, regime - 1, engine)


def _schedule(block, n: int, horizon: int) -> TransitionSchedule:
    if not isinstance(block, dict):
        raise ParseError("expected a [transition] table", field="transition")
    keys = set(block) & {"matrix", "matrices"}
    if len(keys) != 1 or set(block) - keys:
        raise ParseError("[transition] needs exactly one of 'matrix' or 'matrices'", field="transition")
    key = keys.pop()
    try:
        arr = np.array(block[key], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError("expected a numeric (ragged-free) array", field=f"transition.{key}") from exc
    want = 2 if key == "matrix" else 3
    if arr.ndim != want or arr.shape[-1] != n or arr.shape[-2] != n:
        raise ValidationError(f"transition.{key} must be {'an' if want == 2 else 'a list of'} {n} x {n} matrix")
    if key == "matrix":
        schedule = TransitionSchedule(arr[None], homogeneous=True)
    else:
        if arr.shape[0] < horizon - 1:
            raise ValidationError(
                f"transition.matrices has {arr.shape[0]} matrices, horizon {horizon} needs at least {horizon - 1}"
            )
        schedule = TransitionSchedule(arr)
    where = "transition.matrix" if key == "matrix" else "transition.matrices[{k}]"
    try:
        return validate_schedule(schedule)
    except RowSumViolation as exc:
        raise ValidationError(
            f"{where.format(k=exc.k + 1)}: row {exc.i + 1} sums to {exc.total!r}, expected 1"
        ) from exc
    except NegativeEntry as exc:
        raise ValidationError(
            f"{where.format(k=exc.k + 1)}: entry ({exc.i + 1}, {exc.j + 1}) = {exc.value!r} is negative"
        ) from exc


def _int(table: dict, name: str, *, required: bool = False, default=None, prefix: str = "") -> int:
    if name not in table:
        if required:
            raise ParseError("missing required key", field=prefix + name)
        return default
    v = table[name]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"expected an integer, got {v!r}", field=prefix + name)
    return v


def _float(table: dict, name: str, *, default=None, prefix: str = "") -> float:
    if name not in table:
        if default is None:
            raise ParseError("missing required key", field=prefix + name)
        return default
    v = table[name]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"expected a number, got {v!r}", field=prefix + name)
    if not math.isfinite(v):
        raise ValidationError(f"{prefix + name} must be finite")
    return float(v)
